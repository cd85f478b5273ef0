#include <gtest/gtest.h>

#include <mpfr.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mobhoro/error.hpp"
#include "mobhoro/modular.hpp"
#include "oracles.hpp"

using namespace mobhoro;

namespace {

Errc code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc{};
}

double angle_gap(double a, double b)
{
    const double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
    return std::min(d, 2.0 * std::numbers::pi - d);
}

void expect_in_domain(const FundamentalDomainCoords& p)
{
    EXPECT_GE(p.x, -0.5);
    EXPECT_LE(p.x, 0.5);
    EXPECT_GE(p.x * p.x + p.y * p.y, 1.0 - 1e-12);
    EXPECT_GE(p.theta, 0.0);
    EXPECT_LT(p.theta, 2.0 * std::numbers::pi);
    const auto& g = p.gamma;
    EXPECT_EQ(g[0] * g[3] - g[1] * g[2], 1);
}

// Reference orbit point of xi = (1, 0; t, 1) with t = e, built from 256-bit
// MPFR values converted exactly to rationals and reduced with exact moves.
struct Reference {
    oracle::ExactReduction r;
    double theta = 0.0;
};

Reference lower_reference(std::uint64_t n)
{
    mpfr_t t, x, y, den, tmp;
    mpfr_inits2(256, t, x, y, den, tmp, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_ui(t, 1, MPFR_RNDN);
    mpfr_exp(t, t, MPFR_RNDN);
    // xi(n + i) = (n + i) / (t (n + i) + 1); |t(n+i)+1|^2 = (tn + 1)^2 + t^2.
    mpfr_mul_ui(tmp, t, n, MPFR_RNDN);
    mpfr_add_ui(tmp, tmp, 1, MPFR_RNDN);
    mpfr_sqr(den, tmp, MPFR_RNDN);
    mpfr_fma(den, t, t, den, MPFR_RNDN);
    // real part: (n (tn + 1) + t) / den, imaginary part: 1 / den
    mpfr_mul_ui(x, tmp, n, MPFR_RNDN);
    mpfr_add(x, x, t, MPFR_RNDN);
    mpfr_div(x, x, den, MPFR_RNDN);
    mpfr_ui_div(y, 1, den, MPFR_RNDN);
    auto to_q = [](mpfr_t v) {
        mpz_class m;
        const long e = mpfr_get_z_2exp(m.get_mpz_t(), v);
        mpq_class q(m);
        if (e >= 0) mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), e);
        else mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), -e);
        return q;
    };
    Reference ref;
    ref.r = oracle::reduce_exact(to_q(x), to_q(y));
    // lower row of gamma * xi * u^n, with xi u^n = (1, n; t, t n + 1)
    const auto& g = ref.r.gamma;
    mpfr_t r1, r2;
    mpfr_inits2(256, r1, r2, static_cast<mpfr_ptr>(nullptr));
    mpfr_mul_si(r1, t, g[3], MPFR_RNDN);
    mpfr_add_si(r1, r1, g[2], MPFR_RNDN);
    mpfr_mul_si(r2, tmp, g[3], MPFR_RNDN);
    mpfr_set_si(den, g[2], MPFR_RNDN);
    mpfr_mul_ui(den, den, n, MPFR_RNDN);
    mpfr_add(r2, r2, den, MPFR_RNDN);
    double th = std::fmod(-2.0 * std::atan2(mpfr_get_d(r1, MPFR_RNDN), mpfr_get_d(r2, MPFR_RNDN)),
                          2.0 * std::numbers::pi);
    if (th < 0) th += 2.0 * std::numbers::pi;
    ref.theta = th;
    mpfr_clears(t, x, y, den, tmp, r1, r2, static_cast<mpfr_ptr>(nullptr));
    return ref;
}

}  // namespace

TEST(Reduce, Examples)
{
    const auto a = reduce(1.0, 1.0);
    EXPECT_EQ(a.x, 0.0);
    EXPECT_EQ(a.y, 1.0);
    EXPECT_EQ(a.gamma, (IntMatrix{1, -1, 0, 1}));
    const auto b = reduce(0.0, 1.0);
    EXPECT_EQ(b.gamma, kIdentity);
    EXPECT_EQ(b.x, 0.0);
    // on the arc |z| = 1 the representative has x <= 0
    const auto c = reduce(-1.0, 1.0);  // -1 + i -> i
    EXPECT_EQ(c.x, 0.0);
    EXPECT_EQ(c.y, 1.0);
    EXPECT_EQ(code_of([] { reduce(0.0, 0.0); }), Errc::precision);
    EXPECT_EQ(code_of([] { reduce(0.0, NAN); }), Errc::precision);
}

TEST(Reduce, AgainstExactOracle)
{
    // 0.3 + 0.1i lands on the elliptic point i, whose stabiliser S makes gamma
    // ambiguous; only the point is compared there.
    const auto got = reduce(0.3, 0.1);
    const auto ref = oracle::reduce_exact(mpq_class(3, 10), mpq_class(1, 10));
    EXPECT_EQ(ref.x, mpq_class(0));
    EXPECT_EQ(ref.y, mpq_class(1));
    EXPECT_NEAR(got.x, 0.0, 1e-14);
    EXPECT_NEAR(got.y, 1.0, 1e-14);

    // Generic inputs: doubles converted exactly, gamma must agree away from the boundary.
    std::mt19937_64 rng(oracle::kSeed);
    std::uniform_real_distribution<double> ux(-3.0, 3.0), uy(-4.0, 0.5);
    int compared = 0;
    for (int i = 0; i < 500; ++i) {
        const double x = ux(rng), y = std::pow(10.0, uy(rng));
        const auto a = reduce(x, y);
        const auto b = oracle::reduce_exact(mpq_class(x), mpq_class(y));
        const double bx = b.x.get_d(), by = b.y.get_d();
        EXPECT_NEAR(a.x, bx, 1e-9);
        EXPECT_NEAR(a.y, by, 1e-9 * by);
        const bool near_edge = std::abs(bx * bx + by * by - 1.0) < 1e-9 || std::abs(std::abs(bx) - 0.5) < 1e-9;
        if (near_edge) continue;
        ++compared;
        EXPECT_EQ(a.gamma, (IntMatrix{b.gamma[0], b.gamma[1], b.gamma[2], b.gamma[3]})) << x << " " << y;
    }
    EXPECT_GT(compared, 450);
}

TEST(Reduce, IdempotentAndCorrect)
{
    std::mt19937_64 rng(oracle::kSeed);
    std::uniform_real_distribution<double> ux(-20.0, 20.0), uy(-6.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = ux(rng), y = std::pow(10.0, uy(rng));
        const auto p = reduce(x, y);
        expect_in_domain(p);
        const auto again = reduce(p.x, p.y);
        EXPECT_EQ(again.gamma, kIdentity);
        EXPECT_EQ(again.x, p.x);
        EXPECT_EQ(again.y, p.y);
        // gamma z reproduces the reduced point
        const std::complex<long double> z(x, y);
        const auto& g = p.gamma;
        const auto w = (static_cast<long double>(g[0]) * z + static_cast<long double>(g[1])) /
                       (static_cast<long double>(g[2]) * z + static_cast<long double>(g[3]));
        EXPECT_NEAR(static_cast<double>(w.imag()), p.y, 1e-9 * p.y);
    }
}

TEST(ModularPoint, ParseAndDeterminant)
{
    EXPECT_TRUE(ModularPoint::parse("point:identity").is_integral());
    EXPECT_TRUE(ModularPoint::parse("matrix:a=2,b=1,c=1,d=1").is_integral());
    EXPECT_FALSE(ModularPoint::parse("lower:t=exp1").is_integral());
    EXPECT_EQ(code_of([] { ModularPoint::parse("matrix:a=2,b=1,c=1,d=2"); }), Errc::validation);
    EXPECT_EQ(code_of([] { ModularPoint::parse("upper:t=1"); }), Errc::validation);
    EXPECT_EQ(code_of([] { ModularPoint::parse("lower:x=1"); }), Errc::validation);
    EXPECT_EQ(code_of([] { ModularPoint::parse("cusp:z=gamma"); }), Errc::unsupported);
    // xi u^m keeps det 1 (from_entries would reject otherwise)
    const auto xi = ModularPoint::parse("matrix:a=sqrt2,b=1/2,c=1,d=3*sqrt2/4");
    for (std::int64_t m : {1, 7, -3, 1000}) {
        const auto v = xi.times_u(m);
        EXPECT_EQ(v.c(), xi.c());
        EXPECT_EQ(v.d(), xi.d() + xi.c().scaled(m));
    }
}

TEST(Genericity, Examples)
{
    const auto id = genericity(ModularPoint::parse("identity"));
    EXPECT_FALSE(id.generic);
    EXPECT_EQ(id.cusp.kind, CuspDirection::Kind::infinity);
    const auto e = genericity(ModularPoint::parse("cusp:z=e"));
    EXPECT_TRUE(e.generic);
    EXPECT_EQ(e.cusp.kind, CuspDirection::Kind::irrational);
    EXPECT_TRUE(genericity(ModularPoint::parse("lower:t=exp1")).generic);
    const auto q = genericity(ModularPoint::parse("matrix:a=3,b=2,c=4,d=3"));
    EXPECT_FALSE(q.generic);
    EXPECT_EQ(q.cusp.kind, CuspDirection::Kind::rational);
    EXPECT_EQ(q.cusp.rational, mpq_class(3, 4));
    const auto s = genericity(ModularPoint::parse("cusp:z=sqrt2"));
    EXPECT_TRUE(s.generic);
    EXPECT_EQ(s.cusp.kind, CuspDirection::Kind::quadratic);
    // rational in disguise: (sqrt2 * 2) / (sqrt8) = 1
    const auto r = genericity(ModularPoint::parse("matrix:a=2*sqrt2,b=0,c=sqrt8,d=sqrt2/4"));
    EXPECT_FALSE(r.generic);
    EXPECT_EQ(r.cusp.rational, mpq_class(1));
}

TEST(Horocycle, IdentityIsFixed)
{
    const auto xi = ModularPoint::parse("identity");
    for (std::uint64_t n : {0ULL, 1ULL, 2ULL, 17ULL, 1000ULL, 1000000ULL}) {
        const auto p = horocycle_point(xi, n);
        EXPECT_EQ(p.x, 0.0) << n;
        EXPECT_EQ(p.y, 1.0) << n;
        EXPECT_EQ(p.theta, 0.0) << n;
    }
    // Any integral xi sends n + i into the orbit of i; there the frame angle is
    // only defined modulo the stabiliser S, which turns it by pi.
    const auto m = ModularPoint::parse("matrix:a=2,b=1,c=1,d=1");
    for (std::uint64_t n : {0ULL, 1ULL, 5ULL, 99ULL}) {
        const auto p = horocycle_point(m, n);
        EXPECT_NEAR(p.x, 0.0, 1e-15);
        EXPECT_NEAR(p.y, 1.0, 1e-15);
        EXPECT_NEAR(std::fmod(p.theta + 1e-13, std::numbers::pi), 1e-13, 1e-12);
    }
}

TEST(Horocycle, LowerPointAgainst256BitOracle)
{
    const auto xi = ModularPoint::parse("lower:t=e");
    for (std::uint64_t n : {1ULL, 2ULL, 10ULL, 12345ULL, 999983ULL}) {
        const auto got = horocycle_point(xi, n);
        const auto ref = lower_reference(n);
        const auto& g = ref.r.gamma;
        EXPECT_EQ(got.gamma, (IntMatrix{g[0], g[1], g[2], g[3]})) << n;
        EXPECT_NEAR(got.x, ref.r.x.get_d(), 1e-14) << n;
        EXPECT_NEAR(got.y, ref.r.y.get_d(), 1e-14 * ref.r.y.get_d()) << n;
        EXPECT_NEAR(angle_gap(got.theta, ref.theta), 0.0, 1e-12) << n;
        expect_in_domain(got);
    }
}

TEST(Horocycle, OrbitConsistency)
{
    const auto xi = ModularPoint::parse("cusp:z=e");
    std::mt19937_64 rng(oracle::kSeed);
    std::uniform_int_distribution<std::int64_t> pick(0, 1000);
    for (int i = 0; i < 200; ++i) {
        const auto m = pick(rng), n = pick(rng);
        const auto a = horocycle_point(xi, static_cast<std::uint64_t>(m + n));
        const auto b = horocycle_point(xi.times_u(m), static_cast<std::uint64_t>(n));
        EXPECT_NEAR(a.x, b.x, 1e-12) << m << "+" << n;
        EXPECT_NEAR(a.y, b.y, 1e-12 * a.y) << m << "+" << n;
        EXPECT_NEAR(angle_gap(a.theta, b.theta), 0.0, 1e-10) << m << "+" << n;
    }
}

TEST(Horocycle, EvaluatorMatchesSinglePoints)
{
    const auto xi = ModularPoint::parse("cusp:z=pi");
    const OrbitEvaluator ev(xi, 100000);
    EXPECT_EQ(ev.precision_bits(), default_precision_bits(xi, 100000));
    std::vector<std::uint64_t> ns{1, 50, 777, 31415, 100000};
    const auto pts = ev.batch(ns);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto p = horocycle_point(xi, ns[i], ev.precision_bits());
        EXPECT_EQ(pts[i].x, p.x);
        EXPECT_EQ(pts[i].y, p.y);
        EXPECT_EQ(pts[i].theta, p.theta);
        expect_in_domain(pts[i]);
    }
}

TEST(Horocycle, PrecisionPolicy)
{
    const auto xi = ModularPoint::parse("lower:t=exp1");
    EXPECT_GE(default_precision_bits(xi, 1000000), 2 * 20 + 64);
    EXPECT_GE(default_precision_bits(xi, 2), 64);
    EXPECT_EQ(code_of([&] { horocycle_point(xi, 1000000, 40); }), Errc::precision);
    // more bits than needed do not change the reduced point
    const auto a = horocycle_point(xi, 54321);
    const auto b = horocycle_point(xi, 54321, 400);
    EXPECT_EQ(a.gamma, b.gamma);
    EXPECT_NEAR(a.x, b.x, 1e-15);
    EXPECT_NEAR(a.y, b.y, 1e-15 * a.y);
}
