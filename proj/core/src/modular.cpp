#include "mobhoro/modular.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>

#include "mobhoro/error.hpp"
#include "mobhoro/parallel.hpp"

namespace mobhoro {

IntMatrix int_multiply(const IntMatrix& l, const IntMatrix& r)
{
    IntMatrix out{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            std::int64_t p = 0, q = 0, s = 0;
            bool overflow = __builtin_mul_overflow(l[2 * i], r[j], &p);
            overflow |= __builtin_mul_overflow(l[2 * i + 1], r[2 + j], &q);
            overflow |= __builtin_add_overflow(p, q, &s);
            require(!overflow, Errc::range, "reduction matrix overflowed 64-bit integers");
            out[2 * i + j] = s;
        }
    }
    return out;
}

std::string CuspDirection::describe() const
{
    switch (kind) {
    case Kind::infinity: return "infinity";
    case Kind::rational: return rational.get_str();
    case Kind::quadratic:
        return "quadratic(" + abc[0].get_str() + "," + abc[1].get_str() + "," + abc[2].get_str() + ")=" + symbol;
    case Kind::irrational: return "irrational(" + symbol + ")";
    }
    return "?";
}

ModularPoint ModularPoint::from_entries(SymbolicReal a, SymbolicReal b, SymbolicReal c, SymbolicReal d,
                                        std::string label)
{
    ModularPoint p;
    p.e_ = {std::move(a), std::move(b), std::move(c), std::move(d)};
    mpfr_t v[4], det, t;
    for (auto& x : v) mpfr_init2(x, 256);
    mpfr_inits2(256, det, t, static_cast<mpfr_ptr>(nullptr));
    for (int i = 0; i < 4; ++i) p.e_[i].evaluate(v[i], 256);
    mpfr_mul(det, v[0], v[3], MPFR_RNDN);
    mpfr_mul(t, v[1], v[2], MPFR_RNDN);
    mpfr_sub(det, det, t, MPFR_RNDN);
    const double dd = mpfr_get_d(det, MPFR_RNDN);
    for (auto& x : v) mpfr_clear(x);
    mpfr_clears(det, t, static_cast<mpfr_ptr>(nullptr));
    require(std::abs(dd - 1.0) <= 1e-12, Errc::validation,
            "modular point: determinant " + std::to_string(dd) + " is not 1");
    if (label.empty())
        label = "matrix:a=" + p.e_[0].to_string() + ",b=" + p.e_[1].to_string() + ",c=" + p.e_[2].to_string() +
                ",d=" + p.e_[3].to_string();
    p.label_ = std::move(label);
    return p;
}

namespace {

std::map<std::string, std::string> key_values(std::string_view body, std::string_view spec)
{
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    while (pos < body.size()) {
        std::size_t end = body.find(',', pos);
        if (end == std::string_view::npos) end = body.size();
        const auto item = body.substr(pos, end - pos);
        const auto eq = item.find('=');
        require(eq != std::string_view::npos && eq > 0, Errc::validation,
                "malformed key=value '" + std::string(item) + "' in '" + std::string(spec) + "'");
        out.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
        pos = end + 1;
    }
    return out;
}

const std::string& need(const std::map<std::string, std::string>& kv, const std::string& key,
                        std::string_view spec)
{
    auto it = kv.find(key);
    require(it != kv.end(), Errc::validation, "point spec '" + std::string(spec) + "' is missing '" + key + "'");
    return it->second;
}

}  // namespace

ModularPoint ModularPoint::parse(std::string_view spec)
{
    std::string_view s = spec;
    if (s.rfind("point:", 0) == 0) s.remove_prefix(6);
    const auto colon = s.find(':');
    const std::string kind(s.substr(0, colon));
    const auto body = colon == std::string_view::npos ? std::string_view{} : s.substr(colon + 1);
    const auto kv = key_values(body, spec);
    const SymbolicReal zero, one = SymbolicReal::integer(1);
    const std::string label(s);
    if (kind == "identity") return from_entries(one, zero, zero, one, label);
    if (kind == "lower") return from_entries(one, zero, SymbolicReal::parse(need(kv, "t", spec)), one, label);
    if (kind == "cusp")
        return from_entries(SymbolicReal::parse(need(kv, "z", spec)), SymbolicReal::integer(-1), one, zero, label);
    if (kind == "matrix")
        return from_entries(SymbolicReal::parse(need(kv, "a", spec)), SymbolicReal::parse(need(kv, "b", spec)),
                            SymbolicReal::parse(need(kv, "c", spec)), SymbolicReal::parse(need(kv, "d", spec)),
                            label);
    fail(Errc::validation, "unknown point kind '" + kind + "' in '" + std::string(spec) + "'");
}

bool ModularPoint::is_integral() const
{
    return std::all_of(e_.begin(), e_.end(), [](const SymbolicReal& v) {
        return v.is_rational() && v.rational_part().get_den() == 1;
    });
}

ModularPoint ModularPoint::times_u(std::int64_t m) const
{
    const mpq_class q(mpz_class(std::to_string(m)));
    ModularPoint p = *this;
    p.e_[1] = e_[0].scaled(q) + e_[1];
    p.e_[3] = e_[2].scaled(q) + e_[3];
    p.label_ = label_ + "*u^" + std::to_string(m);
    return p;
}

CuspDirection ModularPoint::cusp_direction() const
{
    CuspDirection cd;
    const SymbolicReal& a = e_[0];
    const SymbolicReal& c = e_[2];
    if (c.is_zero()) return cd;
    mpq_class q;
    if (a.rational_multiple_of(c, &q)) {
        cd.kind = CuspDirection::Kind::rational;
        cd.rational = q;
        cd.symbol = q.get_str();
        return cd;
    }
    if (a.transcendental() != Transcendental::none || c.transcendental() != Transcendental::none) {
        // a/c = r with r rational was excluded above; a value in Q(sqrt d) over a
        // value with a nonzero e or pi part (or vice versa) is transcendental.
        cd.kind = CuspDirection::Kind::irrational;
        cd.symbol = "(" + a.to_string() + ")/(" + c.to_string() + ")";
        return cd;
    }
    const std::uint64_t da = a.radicand(), dc = c.radicand();
    require(da == 0 || dc == 0 || da == dc, Errc::unsupported,
            "cusp direction: entries with different radicands");
    const std::uint64_t d = da != 0 ? da : dc;
    const mpq_class r1 = a.rational_part(), s1 = a.surd_coefficient();
    const mpq_class r2 = c.rational_part(), s2 = c.surd_coefficient();
    const mpz_class dz(std::to_string(d));
    const mpq_class norm = r2 * r2 - s2 * s2 * mpq_class(dz);
    mpq_class u = (r1 * r2 - s1 * s2 * mpq_class(dz)) / norm;
    mpq_class v = (s1 * r2 - r1 * s2) / norm;
    u.canonicalize();
    v.canonicalize();
    // z = u + v sqrt d is a root of z^2 - 2u z + (u^2 - v^2 d); pick the sign so that
    // (-B + sqrt(B^2 - 4AC)) / (2A) is this root.
    mpq_class B = -2 * u, C = u * u - v * v * mpq_class(dz);
    mpz_class lcm_den;
    mpz_lcm(lcm_den.get_mpz_t(), B.get_den_mpz_t(), C.get_den_mpz_t());
    mpz_class A = lcm_den;
    mpz_class Bz = B.get_num() * (lcm_den / B.get_den());
    mpz_class Cz = C.get_num() * (lcm_den / C.get_den());
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), A.get_mpz_t(), Bz.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), Cz.get_mpz_t());
    A /= g;
    Bz /= g;
    Cz /= g;
    if (v < 0) {
        A = -A;
        Bz = -Bz;
        Cz = -Cz;
    }
    cd.kind = CuspDirection::Kind::quadratic;
    cd.abc = {A, Bz, Cz};
    cd.symbol = (SymbolicReal(u) + SymbolicReal::sqrt_of(d).scaled(v)).to_string();
    return cd;
}

Genericity genericity(const ModularPoint& xi)
{
    Genericity g;
    g.cusp = xi.cusp_direction();
    g.generic = g.cusp.kind == CuspDirection::Kind::quadratic || g.cusp.kind == CuspDirection::Kind::irrational;
    return g;
}

namespace {

constexpr IntMatrix kS{0, -1, 1, 0};
constexpr int kMaxMoves = 100000;

IntMatrix translation(std::int64_t k) { return {1, k, 0, 1}; }

}  // namespace

FundamentalDomainCoords reduce(double x, double y)
{
    require(std::isfinite(x) && std::isfinite(y) && y > 0.0, Errc::precision,
            "reduce: need finite z with Im z > 0");
    FundamentalDomainCoords out;
    for (;;) {
        require(++out.moves < kMaxMoves, Errc::precision, "reduce: no convergence");
        const double k = std::floor(x + 0.5);
        require(std::abs(k) < 9e15, Errc::range, "reduce: translation out of range");
        if (k != 0.0) {
            x -= k;
            out.gamma = int_multiply(translation(-static_cast<std::int64_t>(k)), out.gamma);
        }
        const double r2 = x * x + y * y;
        if (r2 < 1.0) {
            x = -x / r2;
            y = y / r2;
            out.gamma = int_multiply(kS, out.gamma);
            continue;
        }
        if (r2 == 1.0 && x > 0.0) {
            x = -x;
            out.gamma = int_multiply(kS, out.gamma);
        }
        break;
    }
    out.x = x;
    out.y = y;
    return out;
}

namespace {

// log2 of D_n = (c n + d)^2 + c^2 plus the size of the unreduced x, in double.
double scale_bits(const ModularPoint& xi, std::uint64_t n)
{
    const double a = xi.a().approx(), b = xi.b().approx(), c = xi.c().approx(), d = xi.d().approx();
    const double nd = static_cast<double>(n);
    const double cn = c * nd + d;
    const double big_d = cn * cn + c * c;
    const double x = ((a * nd + b) * cn + a * c) / big_d;
    return std::log2(big_d) + std::log2(2.0 + std::abs(x));
}

int minimum_bits(const ModularPoint& xi, std::uint64_t n_max)
{
    const double s = std::max(scale_bits(xi, 0), scale_bits(xi, n_max));
    return static_cast<int>(std::ceil(std::max(s, 0.0))) + 53;
}

}  // namespace

int default_precision_bits(const ModularPoint& xi, std::uint64_t n)
{
    const int by_n = 2 * static_cast<int>(std::ceil(std::log2(static_cast<double>(std::max<std::uint64_t>(n, 2))))) + 64;
    return std::max(by_n, minimum_bits(xi, n) + 8);
}

namespace {

struct Workspace {
    static constexpr int kSlots = 10;
    explicit Workspace(int bits) : bits(bits)
    {
        for (auto& v : t) mpfr_init2(v, bits);
    }
    ~Workspace()
    {
        for (auto& v : t) mpfr_clear(v);
    }
    int bits;
    mpfr_t t[kSlots];
};

Workspace& workspace(int bits)
{
    thread_local std::unique_ptr<Workspace> ws;
    if (!ws || ws->bits != bits) ws = std::make_unique<Workspace>(bits);
    return *ws;
}

}  // namespace

struct OrbitEvaluator::Impl {
    mpfr_t a, b, c, d;
    ~Impl() { mpfr_clears(a, b, c, d, static_cast<mpfr_ptr>(nullptr)); }
};

OrbitEvaluator::OrbitEvaluator(const ModularPoint& xi, std::uint64_t n_max, std::optional<int> precision_bits)
    : impl_(nullptr), n_max_(n_max)
{
    const int needed = minimum_bits(xi, n_max);
    bits_ = precision_bits.value_or(default_precision_bits(xi, n_max));
    require(bits_ >= needed && bits_ <= 1 << 20, Errc::precision,
            "orbit: " + std::to_string(bits_) + " bits cannot resolve n <= " + std::to_string(n_max) +
                " (need at least " + std::to_string(needed) + ")");
    auto impl = std::make_unique<Impl>();
    mpfr_inits2(bits_, impl->a, impl->b, impl->c, impl->d, static_cast<mpfr_ptr>(nullptr));
    xi.a().evaluate(impl->a, bits_);
    xi.b().evaluate(impl->b, bits_);
    xi.c().evaluate(impl->c, bits_);
    xi.d().evaluate(impl->d, bits_);
    impl_ = impl.release();
}

OrbitEvaluator::~OrbitEvaluator() { delete impl_; }

FundamentalDomainCoords OrbitEvaluator::operator()(std::uint64_t n) const
{
    require(n <= n_max_, Errc::horizon, "orbit: n beyond the evaluator range");
    Workspace& w = workspace(bits_);
    auto& cn = w.t[0];
    auto& an = w.t[1];
    auto& den = w.t[2];
    auto& x = w.t[3];
    auto& y = w.t[4];
    auto& tmp = w.t[5];
    auto& r2 = w.t[6];
    const auto R = MPFR_RNDN;

    mpfr_mul_ui(cn, impl_->c, n, R);
    mpfr_add(cn, cn, impl_->d, R);
    mpfr_mul_ui(an, impl_->a, n, R);
    mpfr_add(an, an, impl_->b, R);
    mpfr_sqr(den, cn, R);
    mpfr_sqr(tmp, impl_->c, R);
    mpfr_add(den, den, tmp, R);
    mpfr_mul(x, an, cn, R);
    mpfr_mul(tmp, impl_->a, impl_->c, R);
    mpfr_add(x, x, tmp, R);
    mpfr_div(x, x, den, R);
    mpfr_ui_div(y, 1, den, R);
    require(mpfr_get_exp(y) > -(bits_ - 53), Errc::precision, "orbit: Im z below the working-precision floor");

    FundamentalDomainCoords out;
    for (;;) {
        require(++out.moves < kMaxMoves, Errc::precision, "orbit: reduction did not converge");
        mpfr_set_d(tmp, 0.5, R);
        mpfr_add(tmp, x, tmp, R);
        mpfr_floor(tmp, tmp);
        require(mpfr_fits_slong_p(tmp, R), Errc::range, "orbit: translation out of range");
        const long k = mpfr_get_si(tmp, R);
        if (k != 0) {
            mpfr_sub_si(x, x, k, R);
            out.gamma = int_multiply(translation(-k), out.gamma);
        }
        mpfr_sqr(r2, x, R);
        mpfr_sqr(tmp, y, R);
        mpfr_add(r2, r2, tmp, R);
        const int cmp = mpfr_cmp_ui(r2, 1);
        if (cmp < 0) {
            mpfr_div(x, x, r2, R);
            mpfr_neg(x, x, R);
            mpfr_div(y, y, r2, R);
            out.gamma = int_multiply(kS, out.gamma);
            continue;
        }
        if (cmp == 0 && mpfr_sgn(x) > 0) {
            mpfr_neg(x, x, R);
            out.gamma = int_multiply(kS, out.gamma);
        }
        break;
    }
    out.x = mpfr_get_d(x, R);
    out.y = mpfr_get_d(y, R);

    // Lower row of gamma * xi * u^n: (g10 a + g11 c, g10 (a n + b) + g11 (c n + d)).
    auto& r1 = w.t[7];
    auto& r2row = w.t[8];
    mpfr_mul_si(r1, impl_->a, out.gamma[2], R);
    mpfr_mul_si(tmp, impl_->c, out.gamma[3], R);
    mpfr_add(r1, r1, tmp, R);
    mpfr_mul_si(r2row, an, out.gamma[2], R);
    mpfr_mul_si(tmp, cn, out.gamma[3], R);
    mpfr_add(r2row, r2row, tmp, R);
    double th = -2.0 * std::atan2(mpfr_get_d(r1, R), mpfr_get_d(r2row, R));
    constexpr double two_pi = 2.0 * std::numbers::pi;
    th = std::fmod(th, two_pi);
    if (th < 0.0) th += two_pi;
    if (th >= two_pi) th = 0.0;
    out.theta = th + 0.0;  // no negative zero
    return out;
}

std::vector<FundamentalDomainCoords> OrbitEvaluator::batch(const std::vector<std::uint64_t>& ns) const
{
    std::vector<FundamentalDomainCoords> out(ns.size());
    parallel_for(ns.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) out[i] = (*this)(ns[i]);
    });
    return out;
}

FundamentalDomainCoords horocycle_point(const ModularPoint& xi, std::uint64_t n, std::optional<int> precision_bits)
{
    return OrbitEvaluator(xi, n, precision_bits)(n);
}

}  // namespace mobhoro
