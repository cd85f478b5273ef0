#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mobhoro/error.hpp"
#include "mobhoro/observable.hpp"
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

}  // namespace

TEST(Observable, ParseAndLabels)
{
    const auto b = Observable::parse("obs:bump:y0=2,width=0.5");
    EXPECT_EQ(b.label(), Observable::bump(2, 0.5).label());
    EXPECT_EQ(b(0.1, 2.0, 0.0), 0.5);
    EXPECT_EQ(b.cusp_limit(), 1.0);
    EXPECT_FALSE(b.frame_dependent());
    EXPECT_EQ(Observable::parse("const:c=0.25").exact_mean(), 0.25);
    EXPECT_TRUE(Observable::parse("frame:k=2,y0=1.5,width=0.5").frame_dependent());
    EXPECT_EQ(Observable::parse("well").cusp_limit(), 0.0);
    EXPECT_EQ(code_of([] { Observable::parse("blob:y0=1"); }), Errc::validation);
    EXPECT_EQ(code_of([] { Observable::parse("bump:y0=abc"); }), Errc::validation);
    EXPECT_EQ(code_of([] { Observable::parse("bump:width=-1"); }), Errc::validation);
    EXPECT_EQ(code_of([] { Observable::parse("frame:k=1,y0=0.5"); }), Errc::validation);
}

TEST(Observable, CuspContinuity)
{
    const Observable fs[] = {Observable::bump(2, 0.5), Observable::well(1.5, 0.4), Observable::frame(3, 1.2, 0.5),
                             Observable::constant(0.7), Observable::bump(2, 0.5).shifted(0.3)};
    for (const auto& f : fs)
        for (double x : {-0.5, 0.0, 0.3})
            for (double th : {0.0, 1.0, 4.0}) EXPECT_NEAR(f(x, 1e6, th), f.cusp_limit(), 1e-6) << f.label();
}

TEST(Observable, Bounded)
{
    const Observable fs[] = {Observable::bump(2, 0.5), Observable::well(1.5, 0.4), Observable::frame(3, 1.2, 0.5)};
    for (const auto& f : fs)
        for (double y = 0.8; y < 1e4; y *= 1.1)
            for (double th = 0.0; th < 6.3; th += 0.7) EXPECT_LE(std::abs(f(0.0, y, th)), f.sup_abs());
}

TEST(Quadrature, SpecRoundTrip)
{
    const auto q = QuadratureSpec::parse("y=500,nx=300,ns=400,ntheta=16,tail=1e-6");
    EXPECT_EQ(q.y_cut, 500.0);
    EXPECT_EQ(q.nx, 300);
    EXPECT_EQ(q.ns, 400);
    EXPECT_EQ(q.ntheta, 16);
    EXPECT_EQ(q.tail_tolerance, 1e-6);
    const auto r = QuadratureSpec::parse(q.to_string());
    EXPECT_EQ(r.to_string(), q.to_string());
    EXPECT_EQ(code_of([] { QuadratureSpec::parse("nx=0"); }), Errc::validation);
    EXPECT_EQ(code_of([] { QuadratureSpec::parse("depth=3"); }), Errc::validation);
}

TEST(Quadrature, DomainMassAndNormalisation)
{
    const auto m = haar_mean(Observable::constant(1.0));
    EXPECT_NEAR(m.domain_mass, std::numbers::pi / 3.0, 1e-10);
    EXPECT_NEAR(m.mean, 1.0, 1e-12);
    EXPECT_NEAR(haar_mean(Observable::constant(-0.4)).mean, -0.4, 1e-12);
}

TEST(Quadrature, BumpAgainstOneDimensionalOracle)
{
    for (auto [y0, w] : {std::pair{2.0, 0.5}, {1.2, 0.1}, {3.0, 1.0}}) {
        const auto f = Observable::bump(y0, w);
        const double expect = oracle::haar_mean_1d([&](double y) { return f(0.0, y, 0.0); });
        EXPECT_NEAR(haar_mean(f).mean, expect, 1e-8) << y0 << " " << w;
    }
    const auto g = Observable::well(1.5, 0.4);
    EXPECT_NEAR(haar_mean(g).mean, oracle::haar_mean_1d([&](double y) { return g(0.0, y, 0.0); }), 1e-8);
}

TEST(Quadrature, FrameObservables)
{
    QuadratureSpec q;
    q.nx = q.ns = 300;
    q.ntheta = 16;
    // the theta average of cos(k theta) vanishes for k >= 1
    EXPECT_NEAR(haar_mean(Observable::frame(2, 1.2, 0.5), q).mean, 0.0, 1e-12);
    const auto f0 = Observable::frame(0, 1.2, 0.5);
    EXPECT_NEAR(haar_mean(f0, q).mean, oracle::haar_mean_1d([&](double y) { return f0(0.0, y, 0.0); }), 1e-6);
}

TEST(Quadrature, TailErrorIsReported)
{
    QuadratureSpec q;
    q.nx = q.ns = 200;
    EXPECT_EQ(code_of([&] { haar_mean(Observable::bump(2000.0, 0.5), q); }), Errc::quadrature);
    // y^-1 decay is too slow for y_cut = 10 at the default tolerance
    q.y_cut = 10.0;
    EXPECT_EQ(code_of([&] { haar_mean(Observable::well(5.0, 1.0), q); }), Errc::quadrature);
}

TEST(Split, Examples)
{
    const auto one = split_observable(Observable::constant(1.0));
    EXPECT_EQ(one.mean, 1.0);
    EXPECT_EQ(one.centered(0.1, 2.0, 0.0), 0.0);
    const auto b = split_observable(Observable::bump(2.0, 0.5));
    EXPECT_NEAR(haar_mean(b.centered).mean, 0.0, 1e-6);
    EXPECT_NEAR(b.centered(0.0, 3.0, 0.0) + b.mean, Observable::bump(2.0, 0.5)(0.0, 3.0, 0.0), 1e-15);
    const auto again = split_observable(b.centered);
    EXPECT_NEAR(again.mean, 0.0, 1e-6);
    const auto c = Observable::parse("bump:y0=2,width=0.5,centered");
    EXPECT_NEAR(c(0.0, 3.0, 0.0), b.centered(0.0, 3.0, 0.0), 1e-15);
}
