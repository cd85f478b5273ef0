#include "mobhoro/correlator.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mobhoro/error.hpp"
#include "mobhoro/symbolic.hpp"

namespace mobhoro {

ParabolicElement ParabolicElement::make(double alpha, double beta, double delta, double lower)
{
    require(lower == 0.0, Errc::validation, "parabolic element: lower-left entry must be exactly 0");
    require(std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(delta) &&
                std::abs(alpha * delta - 1.0) <= 1e-12,
            Errc::validation, "parabolic element: need alpha * delta = 1");
    return {alpha, beta, delta, 0.0};
}

ParabolicElement ParabolicElement::operator*(const ParabolicElement& o) const
{
    return {alpha * o.alpha, alpha * o.beta + beta * o.delta, delta * o.delta, 0.0};
}

double chi(const ParabolicElement& b)
{
    require(b.lower == 0.0 && std::abs(b.alpha * b.delta - 1.0) <= 1e-12, Errc::validation,
            "chi: not an upper-triangular element with alpha * delta = 1");
    return b.alpha * b.alpha;
}

ConjugationCheck conjugation_exponent_check(const ParabolicElement& b, double tolerance)
{
    ConjugationCheck c;
    c.chi = chi(b);
    // beta u = (alpha, alpha + beta; 0, delta); beta^-1 = (delta, -beta; 0, alpha).
    const double m00 = b.alpha, m01 = b.alpha + b.beta, m11 = b.delta;
    c.product = {m00 * b.delta, -m00 * b.beta + m01 * b.alpha, 0.0, m11 * b.alpha};
    const std::array<double, 4> want{1.0, c.chi, 0.0, 1.0};
    for (int i = 0; i < 4; ++i) {
        const double scale = std::max(1.0, std::abs(want[i]));
        c.max_error = std::max(c.max_error, std::abs(c.product[i] - want[i]) / scale);
    }
    c.pass = c.max_error <= tolerance;
    return c;
}

QuadraticNumber QuadraticNumber::operator*(const QuadraticNumber& o) const
{
    const mpz_class dd = d != 0 ? d : o.d;
    QuadraticNumber r;
    r.d = dd;
    r.x = x * o.x + y * o.y * mpq_class(dd);
    r.y = x * o.y + y * o.x;
    return r;
}

QuadraticNumber QuadraticNumber::operator/(const QuadraticNumber& o) const
{
    const mpq_class norm = o.x * o.x - o.y * o.y * mpq_class(o.d);
    require(norm != 0, Errc::domain, "quadratic number: division by zero");
    QuadraticNumber conj{o.x / norm, -o.y / norm, o.d};
    return *this * conj;
}

double QuadraticNumber::approx() const { return x.get_d() + y.get_d() * std::sqrt(d.get_d()); }

std::string QuadraticNumber::to_string() const
{
    if (y == 0) return x.get_str();
    std::string s = x == 0 ? "" : x.get_str() + (y > 0 ? "+" : "");
    return s + y.get_str() + "*sqrt" + d.get_str();
}

PointDescriptor PointDescriptor::infinity()
{
    PointDescriptor p;
    p.symbol = "infinity";
    return p;
}

PointDescriptor PointDescriptor::from_rational(mpq_class q)
{
    q.canonicalize();
    PointDescriptor p;
    p.kind = Kind::rational;
    p.rational = q;
    p.symbol = q.get_str();
    return p;
}

PointDescriptor PointDescriptor::quadratic_surd(mpz_class a, mpz_class b, mpz_class c)
{
    require(a != 0, Errc::validation, "quadratic surd: leading coefficient must be nonzero");
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    require(g == 1, Errc::validation, "quadratic surd: gcd(a, b, c) must be 1");
    const mpz_class d = b * b - 4 * a * c;
    require(d > 0, Errc::validation, "quadratic surd: discriminant must be positive");
    require(mpz_perfect_square_p(d.get_mpz_t()) == 0, Errc::validation,
            "quadratic surd: discriminant " + d.get_str() + " is a square");
    PointDescriptor p;
    p.kind = Kind::quadratic_surd;
    p.abc = {a, b, c};
    p.symbol = "(" + mpz_class(-b).get_str() + "+sqrt" + d.get_str() + ")/" + mpz_class(2 * a).get_str();
    return p;
}

PointDescriptor PointDescriptor::non_quadratic(std::string symbol)
{
    PointDescriptor p;
    p.kind = Kind::non_quadratic_irrational;
    p.symbol = std::move(symbol);
    return p;
}

PointDescriptor PointDescriptor::from_cusp(const CuspDirection& c)
{
    switch (c.kind) {
    case CuspDirection::Kind::infinity: return infinity();
    case CuspDirection::Kind::rational: return from_rational(c.rational);
    case CuspDirection::Kind::quadratic: return quadratic_surd(c.abc[0], c.abc[1], c.abc[2]);
    case CuspDirection::Kind::irrational: return non_quadratic(c.symbol);
    }
    return infinity();
}

PointDescriptor PointDescriptor::parse(std::string_view text)
{
    const std::string s(text);
    if (s == "inf" || s == "infinity" || s == "oo") return infinity();
    if (s.rfind("sqrt:", 0) == 0) {
        const mpz_class n(s.substr(5));
        require(n > 0, Errc::validation, "descriptor '" + s + "': sqrt needs a positive integer");
        if (mpz_perfect_square_p(n.get_mpz_t())) {
            mpz_class r;
            mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
            return from_rational(mpq_class(r));
        }
        return quadratic_surd(1, 0, -n);
    }
    if (s.rfind("surd:", 0) == 0) {
        std::stringstream items(s.substr(5));
        std::array<mpz_class, 3> abc;
        int k = 0;
        for (std::string item; std::getline(items, item, ',');) {
            require(k < 3, Errc::validation, "descriptor '" + s + "': expected surd:a,b,c");
            try {
                abc[k++] = mpz_class(item);
            } catch (const std::invalid_argument&) {
                fail(Errc::validation, "descriptor '" + s + "': '" + item + "' is not an integer");
            }
        }
        require(k == 3, Errc::validation, "descriptor '" + s + "': expected surd:a,b,c");
        return quadratic_surd(abc[0], abc[1], abc[2]);
    }
    const SymbolicReal z = SymbolicReal::parse(s);
    const auto xi = ModularPoint::from_entries(z, SymbolicReal::integer(-1), SymbolicReal::integer(1), SymbolicReal());
    PointDescriptor p = from_cusp(xi.cusp_direction());
    if (p.kind == Kind::non_quadratic_irrational) p.symbol = z.to_string();
    return p;
}

mpz_class PointDescriptor::discriminant() const { return abc[1] * abc[1] - 4 * abc[0] * abc[2]; }

std::string PointDescriptor::describe() const
{
    switch (kind) {
    case Kind::infinity: return "Infinity";
    case Kind::rational: return "Rational(" + rational.get_str() + ")";
    case Kind::quadratic_surd:
        return "QuadraticSurd(" + abc[0].get_str() + "," + abc[1].get_str() + "," + abc[2].get_str() + ")";
    case Kind::non_quadratic_irrational: return "NonQuadraticIrrational(" + symbol + ")";
    }
    return "?";
}

namespace {

// chi of xi^-1 (gamma / sqrt det) xi with xi = (z, -1; 1, 0), at 256 bits.
double conjugated_chi(const std::array<mpq_class, 4>& g, const mpq_class& det, const QuadraticNumber& z)
{
    constexpr mpfr_prec_t P = 256;
    mpfr_t zr, s, e[4], b11, b22, t;
    mpfr_inits2(P, zr, s, b11, b22, t, static_cast<mpfr_ptr>(nullptr));
    for (auto& v : e) mpfr_init2(v, P);
    mpfr_set_z(zr, z.d.get_mpz_t(), MPFR_RNDN);
    mpfr_sqrt(zr, zr, MPFR_RNDN);
    mpfr_mul_q(zr, zr, z.y.get_mpq_t(), MPFR_RNDN);
    mpfr_add_q(zr, zr, z.x.get_mpq_t(), MPFR_RNDN);
    mpfr_set_q(s, det.get_mpq_t(), MPFR_RNDN);
    mpfr_sqrt(s, s, MPFR_RNDN);
    for (int i = 0; i < 4; ++i) {
        mpfr_set_q(e[i], g[i].get_mpq_t(), MPFR_RNDN);
        mpfr_div(e[i], e[i], s, MPFR_RNDN);
    }
    // xi^-1 = (0, 1; -1, z); (xi^-1 g xi)_11 = C z + D, _22 = A - C z.
    mpfr_mul(t, e[2], zr, MPFR_RNDN);
    mpfr_add(b11, t, e[3], MPFR_RNDN);
    mpfr_sub(b22, e[0], t, MPFR_RNDN);
    mpfr_div(t, b11, b22, MPFR_RNDN);
    const double out = mpfr_get_d(t, MPFR_RNDN);
    mpfr_clears(zr, s, b11, b22, t, static_cast<mpfr_ptr>(nullptr));
    for (auto& v : e) mpfr_clear(v);
    return out;
}

}  // namespace

SurdElement surd_group_element(const mpz_class& a, const mpz_class& b, const mpz_class& c, const mpq_class& t,
                               const mpq_class& u)
{
    const PointDescriptor z = PointDescriptor::quadratic_surd(a, b, c);
    const mpz_class d = z.discriminant();
    SurdElement e;
    e.norm = (t * t - mpq_class(d) * u * u) / 4;
    require(e.norm > 0, Errc::validation, "surd element: need t^2 - d u^2 > 0");
    const mpq_class qa(a), qb(b), qc(c);
    e.matrix = {(t - qb * u) / 2, -qc * u, qa * u, (t + qb * u) / 2};
    for (auto& m : e.matrix) m.canonicalize();
    e.value = QuadraticNumber{t, u, d} / QuadraticNumber{t, -u, d};
    e.value.x.canonicalize();
    e.value.y.canonicalize();
    e.rational = e.value.is_rational();

    const QuadraticNumber zq{mpq_class(-qb / (2 * qa)), mpq_class(1 / (2 * qa)), d};
    const QuadraticNumber num = QuadraticNumber{e.matrix[0], 0, d} * zq;
    const QuadraticNumber top{num.x + e.matrix[1], num.y, d};
    const QuadraticNumber low0 = QuadraticNumber{e.matrix[2], 0, d} * zq;
    const QuadraticNumber bottom{low0.x + e.matrix[3], low0.y, d};
    const QuadraticNumber image = top / bottom;
    e.stabilizes = image.x == zq.x && image.y == zq.y;

    e.chi_conjugated = conjugated_chi(e.matrix, e.norm, zq);
    const double v = e.value.approx();
    e.chi_matches = std::abs(e.chi_conjugated - v) <= 1e-10 * std::max(1.0, std::abs(v));
    return e;
}

CorrelatorClass classify_correlator(const PointDescriptor& z)
{
    CorrelatorClass out;
    out.point = z;
    switch (z.kind) {
    case PointDescriptor::Kind::infinity:
    case PointDescriptor::Kind::rational: out.kind = CorrelatorClass::Kind::full_rational_group; break;
    case PointDescriptor::Kind::quadratic_surd: {
        const mpz_class d = z.discriminant();
        require(d > 0 && mpz_perfect_square_p(d.get_mpz_t()) == 0, Errc::validation,
                "classify: quadratic surd with square or non-positive discriminant");
        out.kind = CorrelatorClass::Kind::trivial_group;
        mpz_class root;
        mpz_sqrt(root.get_mpz_t(), d.get_mpz_t());
        out.witness = surd_group_element(z.abc[0], z.abc[1], z.abc[2], mpq_class(root + 1), mpq_class(1));
        break;
    }
    case PointDescriptor::Kind::non_quadratic_irrational: out.kind = CorrelatorClass::Kind::trivial_group; break;
    }
    return out;
}

}  // namespace mobhoro
