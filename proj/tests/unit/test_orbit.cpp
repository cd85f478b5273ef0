#include <gtest/gtest.h>

#include <cmath>

#include "mobhoro/error.hpp"
#include "mobhoro/orbit.hpp"
#include "mobhoro/parallel.hpp"
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

OrbitOptions small_quadrature()
{
    OrbitOptions o;
    o.quadrature.nx = o.quadrature.ns = 400;
    return o;
}

}  // namespace

TEST(Birkhoff, ConstantAndFixedOrbit)
{
    const auto e = ModularPoint::parse("cusp:z=e");
    EXPECT_EQ(birkhoff_average(Observable::constant(1.0), e, 5000), 1.0);
    EXPECT_EQ(birkhoff_average(Observable::constant(0.3), e, 777), 0.3);
    const auto id = ModularPoint::parse("identity");
    const auto f = Observable::bump(2.0, 0.5);
    const double base = f(0.0, 1.0, 0.0);
    EXPECT_EQ(birkhoff_average(f, id, 1000), base);
    EXPECT_EQ(code_of([&] { birkhoff_average(f, id, 0); }), Errc::validation);
}

TEST(Birkhoff, MatchesSeriesAndIsThreadIndependent)
{
    const auto xi = ModularPoint::parse("cusp:z=pi");
    const auto f = Observable::well(1.5, 0.4);
    const auto series = orbit_series(xi, f, 1, 3000);
    ASSERT_EQ(series.size(), 3000u);
    EXPECT_EQ(series.front().n, 1u);
    long double direct = 0.0L;
    for (const auto& s : series) direct += s.f;
    set_default_threads(1);
    const double a = birkhoff_average(f, xi, 3000);
    set_default_threads(4);
    const double b = birkhoff_average(f, xi, 3000);
    set_default_threads(0);
    EXPECT_EQ(a, b);
    EXPECT_NEAR(a, static_cast<double>(direct / 3000.0L), 1e-15);
}

TEST(PairCorrelation, FixedPointAndConstant)
{
    const auto id = ModularPoint::parse("identity");
    const auto f = Observable::bump(2.0, 0.5);
    const double base = f(0.0, 1.0, 0.0);
    const auto c = pair_correlation(f, id, 2, 3, 500, small_quadrature());
    EXPECT_EQ(c.value, base * base);
    const auto one = pair_correlation(Observable::constant(1.0), ModularPoint::parse("cusp:z=e"), 2, 3, 1000);
    EXPECT_EQ(one.value, 1.0);
    EXPECT_EQ(one.target, 1.0);
    EXPECT_EQ(one.gap, 0.0);
    EXPECT_EQ(code_of([&] { pair_correlation(f, id, 3, 3, 10); }), Errc::validation);
}

TEST(PairCorrelation, BoundedBySupSquared)
{
    const auto xi = ModularPoint::parse("cusp:z=e");
    const auto f = split_observable(Observable::bump(2.0, 0.5), small_quadrature().quadrature).centered;
    for (auto [p, q] : {std::pair<std::uint64_t, std::uint64_t>{2, 3}, {5, 7}, {3, 11}}) {
        const auto c = pair_correlation(f, xi, p, q, 2000, small_quadrature());
        EXPECT_LE(std::abs(c.value), f.sup_abs() * f.sup_abs());
        EXPECT_NEAR(c.target, 0.0, 1e-12);
    }
}

TEST(Disjointness, MertensRatioForConstant)
{
    const auto mu = sieve_mobius(1000);
    const auto r =
        mobius_disjointness_sum(ModularPoint::parse("cusp:z=e"), Observable::constant(1.0), {100, 1000}, mu);
    ASSERT_EQ(r.ladder.size(), 2u);
    EXPECT_EQ(r.ladder[0].total, 0.01);
    EXPECT_EQ(r.ladder[0].mertens_ratio, 0.01);
    EXPECT_EQ(r.ladder[0].centered, 0.0);
    long m1000 = 0;
    for (std::uint64_t n = 1; n <= 1000; ++n) m1000 += oracle::mobius(n);
    EXPECT_EQ(r.ladder[1].total, m1000 / 1000.0);
}

TEST(Disjointness, FixedOrbitAndSplit)
{
    const auto mu = sieve_mobius(5000);
    const auto f = Observable::bump(2.0, 0.5);
    const double base = f(0.0, 1.0, 0.0);
    const auto r = mobius_disjointness_sum(ModularPoint::parse("identity"), f, {500, 5000}, mu, small_quadrature());
    for (const auto& g : r.ladder) {
        EXPECT_NEAR(g.total, base * g.mertens_ratio, 1e-15);
        EXPECT_NEAR(g.centered + g.constant, g.total, 1e-15);
    }
    const auto x = mobius_disjointness_sum(ModularPoint::parse("cusp:z=sqrt3"), f, {5000}, mu, small_quadrature());
    EXPECT_NEAR(x.ladder[0].centered + x.ladder[0].constant, x.ladder[0].total, 1e-15);
    EXPECT_NEAR(x.ladder[0].constant, x.mean * x.ladder[0].mertens_ratio, 1e-15);
}

TEST(Disjointness, Validation)
{
    const auto mu = sieve_mobius(100);
    const auto xi = ModularPoint::parse("cusp:z=e");
    const auto f = Observable::constant(1.0);
    EXPECT_EQ(code_of([&] { mobius_disjointness_sum(xi, f, {}, mu); }), Errc::validation);
    EXPECT_EQ(code_of([&] { mobius_disjointness_sum(xi, f, {50, 20}, mu); }), Errc::validation);
    EXPECT_EQ(code_of([&] { mobius_disjointness_sum(xi, f, {200}, mu); }), Errc::horizon);
    const auto c = sieve_multiplicative(100, "c", [](std::uint64_t, int) { return std::complex<double>(0, 1); });
    EXPECT_EQ(code_of([&] { mobius_disjointness_sum(xi, f, {50}, c); }), Errc::unsupported);
}
