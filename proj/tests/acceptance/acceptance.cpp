// One PASS/FAIL line per acceptance criterion. A criterion passes only if its
// checks hold and it finishes inside its runtime limit.
//
//   mobhoro_acceptance            run all
//   mobhoro_acceptance 3 7        run a subset

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mobhoro/arith.hpp"
#include "mobhoro/correlator.hpp"
#include "mobhoro/criterion.hpp"
#include "mobhoro/decomp.hpp"
#include "mobhoro/error.hpp"
#include "mobhoro/modular.hpp"
#include "mobhoro/observable.hpp"
#include "mobhoro/orbit.hpp"
#include "mobhoro/symbolic.hpp"
#include "oracles.hpp"

using namespace mobhoro;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::string failed;  // first few failed checks
    int failures = 0;

    void check(bool ok, const std::string& what)
    {
        if (ok) return;
        if (failures < 4) failed += " [failed: " + what + "]";
        pass = false;
        ++failures;
    }
};

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<void(Outcome&)> body;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Shared decomposition setting of criteria 2 to 5.
constexpr double kAlpha = 0.3;
constexpr int kJ0 = 9, kJ1 = 30;

PrimeTable primes_for(std::uint64_t n, const DecompositionParams& p)
{
    return sieve_primes(std::max<std::uint64_t>(n, static_cast<std::uint64_t>(std::ceil(p.d1())) + 1));
}

void sieve_oracle(Outcome& o)
{
    const std::uint64_t n = 100000;
    const auto mu = sieve_mobius(n);
    const auto lambda = sieve_liouville(n);
    std::uint64_t mismatches = 0;
    for (std::uint64_t k = 1; k <= n; ++k) {
        if (mu.sign(k) != oracle::mobius(k)) ++mismatches;
        if (lambda.sign(k) != oracle::liouville(k)) ++mismatches;
    }
    o.check(mismatches == 0, std::to_string(mismatches) + " mismatches against trial division");
    long m100 = 0, l100 = 0;
    for (std::uint64_t k = 1; k <= 100; ++k) {
        m100 += oracle::mobius(k);
        l100 += oracle::liouville(k);
    }
    const double sm = mu.partial_sum(100).real(), sl = lambda.partial_sum(100).real();
    o.check(m100 == 1 && sm == 1.0, "sum mu(n), n <= 100 = 1");
    o.check(l100 == -2 && sl == -2.0, "sum lambda(n), n <= 100 = -2");
    o.detail << "n<=" << n << " mu,lambda exact; M(100)=" << sm << " L(100)=" << sl;
}

void decomposition_exact(Outcome& o)
{
    const std::uint64_t n = 100000;
    const auto params = DecompositionParams::make(n, kAlpha, kJ0, kJ1);
    const auto primes = primes_for(n, params);
    const auto d = build_decomposition(params, primes);

    // Independent membership by trial division: the blocks containing each prime
    // factor in (D0, D1), then the minimal one.
    std::uint64_t disjoint_bad = 0, class_bad = 0;
    for (std::uint64_t k = 1; k < n; ++k) {
        int jmin = kJ1;
        std::vector<std::pair<int, int>> block_exponent;  // (block, exponent)
        for (auto [p, e] : oracle::factor(k)) {
            const double pd = static_cast<double>(p);
            if (!(pd > params.d0() && pd < params.d1())) continue;
            const int j = block_index(kAlpha, pd);
            block_exponent.emplace_back(j, e);
            jmin = std::min(jmin, j);
        }
        // every j for which k satisfies the S_j definition
        int memberships = 0, member_j = -1;
        for (int j = kJ0; j < kJ1; ++j) {
            bool lower = false;
            int count = 0, exp = 0;
            for (auto [b, e] : block_exponent) {
                if (b < j) lower = true;
                if (b == j) ++count, exp = e;
            }
            if (!lower && count == 1 && exp == 1) ++memberships, member_j = j;
        }
        if (memberships > 1) ++disjoint_bad;
        const auto c = d.at(k);
        const bool ok = block_exponent.empty()  ? c.kind == Membership::not_in_s
                        : memberships == 1      ? c.kind == Membership::in_sj && c.j == member_j
                                                : c.kind == Membership::in_s_multiple && c.j == jmin;
        if (!ok) ++class_bad;
    }
    o.check(disjoint_bad == 0, std::to_string(disjoint_bad) + " n in two S_j");
    o.check(class_bad == 0, std::to_string(class_bad) + " classifications differ from trial division");

    // P_jQ_j inside S_j, and (p, q) -> pq injective with p recovered from pq.
    std::vector<std::uint8_t> seen(n, 0);
    std::uint64_t products = 0, inclusion_bad = 0, collisions = 0, recovery_bad = 0;
    for (const auto& b : d.blocks()) {
        const int j = b.block.j;
        const auto qs = d.q_set(j);
        for (auto p : b.block.primes)
            for (auto q : qs) {
                const std::uint64_t m = p * q;
                ++products;
                if (m >= n) {
                    ++inclusion_bad;
                    continue;
                }
                if (seen[m]++) ++collisions;
                const auto c = d.at(m);
                if (!(c.kind == Membership::in_sj && c.j == j)) ++inclusion_bad;
                int jj = -1;
                if (!(d.in_product_set(m, &jj) && jj == j && c.prime == p && m / c.prime == q &&
                      q_membership(m / c.prime, j, params, primes)))
                    ++recovery_bad;
            }
    }
    o.check(inclusion_bad == 0 && d.inclusion_violations() == 0,
            std::to_string(inclusion_bad) + " products outside S_j");
    o.check(collisions == 0, std::to_string(collisions) + " product collisions");
    o.check(recovery_bad == 0, std::to_string(recovery_bad) + " factor recoveries failed");
    o.check(products == d.pq_total(), "|U P_jQ_j| equals sum |P_j||Q_j|");
    o.check(d.universe() == d.not_in_s() + d.s_total() + d.multiple_total(), "counting identity");
    o.detail << "N=" << n << " blocks=" << d.blocks().size() << " products=" << products
             << " leftover=" << d.leftover() << "/" << d.universe();
}

void coverage_mertens(Outcome& o)
{
    const std::uint64_t n = 1000000;
    const auto params = DecompositionParams::make(n, kAlpha, kJ0, kJ1);
    const auto primes = primes_for(n, params);
    const auto d = build_decomposition(params, primes);
    const auto r = coverage_report(d, primes);
    double product = 1.0;
    for (auto p : primes.primes()) {
        const double pd = static_cast<double>(p);
        if (pd > params.d0() && pd < params.d1()) product *= 1.0 - 1.0 / pd;
    }
    const double fraction = static_cast<double>(d.not_in_s()) / static_cast<double>(n);
    const double gap = rel(fraction, product);
    o.check(rel(r.mertens_product, product) < 1e-12, "reported product matches recomputation");
    o.check(rel(r.complement_fraction, fraction) < 1e-12, "reported fraction matches recomputation");
    o.check(gap <= 0.10, "relative gap within 10%");
    char buf[160];
    std::snprintf(buf, sizeof buf, "|[1,N)\\S|/N=%.6f prod(1-1/l)=%.6f gap=%.2f%%", fraction, product, 100 * gap);
    o.detail << buf;
}

CriterionReport criterion_run(std::uint64_t n, const PrimeTable& primes)
{
    const auto params = DecompositionParams::make(n, kAlpha, kJ0, kJ1);
    const auto mu = sieve_mobius(n);
    const auto f = exponential_sequence(SymbolicReal::sqrt_of(2), required_horizon(params, primes));
    CriterionInput in;
    in.n = n;
    in.alpha = kAlpha;
    in.j0 = kJ0;
    in.j1 = kJ1;
    in.prime_cutoff = 50.0;
    return criterion_ledger(mu, f, in, primes);
}

void criterion_end_to_end(Outcome& o)
{
    const std::uint64_t n = 1000000;
    const auto params = DecompositionParams::make(n, kAlpha, kJ0, kJ1);
    const auto primes = primes_for(n, params);
    const auto r = criterion_run(n, primes);

    mpf_class sqrt2(0, 512);
    mpf_sqrt_ui(sqrt2.get_mpf_t(), 2);
    double worst_rel = 0.0, closed_max = 0.0;
    for (const auto& pc : r.tau.pairs) {
        o.check(pc.m == n / std::max(pc.p1, pc.p2), "M = floor(N / max(p1, p2))");
        const double closed = oracle::geometric_modulus(sqrt2, static_cast<long>(pc.p1) - static_cast<long>(pc.p2), pc.m) /
                              static_cast<double>(pc.m);
        worst_rel = std::max(worst_rel, rel(pc.normalized, closed));
        closed_max = std::max(closed_max, closed);
    }
    o.check(r.tau.pairs.size() == 105, "all 105 prime pairs below 50");  // pi(50) = 15
    o.check(worst_rel <= 1e-9, "per-pair closed form within 1e-9 relative");
    o.check(rel(r.tau.tau_hat, closed_max) <= 1e-9, "tau_hat is the closed-form maximum");
    const double floor_tau = 1.0 / std::log(50.0);
    o.check(r.tau_effective == std::max(r.tau.tau_hat, floor_tau), "tau_effective = max(tau_hat, 1/ln P)");
    const double bound = 2.0 * std::sqrt(r.tau_effective * std::log(1.0 / r.tau_effective)) * static_cast<double>(n);
    o.check(rel(r.bound_rhs, bound) < 1e-14, "bound = 2 sqrt(tau ln 1/tau) N");
    const double lhs = std::abs(r.weighted_sum);
    o.check(lhs <= bound, "|sum mu(n) F(n)| <= bound");
    o.check(bound >= 10.0 * lhs, "margin factor >= 10");
    char buf[200];
    std::snprintf(buf, sizeof buf, "tau_hat=%.4g tau_eff=%.4f |S|=%.1f bound=%.4g margin=%.0f pair-rel<=%.1e", r.tau.tau_hat,
                  r.tau_effective, lhs, bound, bound / lhs, worst_rel);
    o.detail << buf;
}

void ledger_soundness(Outcome& o)
{
    const std::uint64_t n = 100000;
    const auto params = DecompositionParams::make(n, kAlpha, kJ0, kJ1);
    const auto primes = primes_for(n, params);
    const auto r = criterion_run(n, primes);
    int unconditional = 0;
    for (const auto& c : r.checks) {
        if (!c.unconditional) continue;
        ++unconditional;
        o.check(c.holds, c.line);
    }
    o.check(unconditional > 0, "ledger has unconditional checks");
    o.check(r.unconditional_chain_holds(), "unconditional chain holds");
    // exact leftover accounting: the products plus the leftover are the whole sum
    o.check(std::abs(r.ledger_sum - r.weighted_sum) <= 1e-9 * std::max(1.0, std::abs(r.weighted_sum)),
            "ledger sum equals the direct sum");
    const auto d = build_decomposition(params, primes);
    // the ledger sums over n <= N; n = N lies outside [1, N) and is never a product
    o.check(r.leftover_count == d.leftover() + 1, "leftover count is exact");
    o.detail << "N=" << n << " unconditional steps=" << unconditional;
}

void fixed_point(Outcome& o)
{
    const auto id = ModularPoint::parse("identity");
    const auto f = Observable::bump(2.0, 0.5);
    const auto base_point = horocycle_point(id, 1);
    const double base = f(base_point.x, base_point.y, base_point.theta);
    for (const auto& s : orbit_series(id, f, 1, 1000))
        if (s.point.x != base_point.x || s.point.y != base_point.y || s.f != base) {
            o.check(false, "orbit not constant at n=" + std::to_string(s.n));
            break;
        }
    for (std::uint64_t n : {100u, 10000u, 1000000u}) {
        const auto c = pair_correlation(f, id, 2, 3, n);
        o.check(c.value == base * base, "pair correlation == f(base)^2 at N=" + std::to_string(n));
    }
    const std::vector<std::uint64_t> ladder{100, 10000, 1000000};
    const auto mu = sieve_mobius(ladder.back());
    const auto r = mobius_disjointness_sum(id, f, ladder, mu);
    for (const auto& g : r.ladder) {
        const double expected = base * mu.partial_sum(g.n).real() / static_cast<double>(g.n);
        o.check(rel(g.total, expected) <= 1e-12, "disjointness sum == f(base) M(N)/N at N=" + std::to_string(g.n));
    }
    o.detail << "f(base)=" << base << " N up to 1e6";
}

void reduction(Outcome& o)
{
    std::mt19937_64 rng(oracle::kSeed);
    std::uniform_real_distribution<double> ux(-50.0, 50.0), ulog(-4.0, 2.0);
    std::uint64_t bad_gamma = 0, bad_domain = 0, bad_image = 0, bad_idem = 0;
    std::vector<std::pair<double, double>> inputs;
    for (int i = 0; i < 10000; ++i) {
        const double x = ux(rng), y = std::pow(10.0, ulog(rng));
        inputs.emplace_back(x, y);
        const auto r = reduce(x, y);
        const auto& g = r.gamma;
        const __int128 det = static_cast<__int128>(g[0]) * g[3] - static_cast<__int128>(g[1]) * g[2];
        if (det != 1) ++bad_gamma;
        if (!(r.x >= -0.5 && r.x < 0.5 && r.x * r.x + r.y * r.y >= 1.0 - 1e-12)) ++bad_domain;
        // gamma z computed independently in long double
        const long double a = g[0], b = g[1], c = g[2], dd = g[3];
        const long double cx = c * x + dd, cy = c * y, den = cx * cx + cy * cy;
        const long double gx = ((a * x + b) * cx + a * y * cy) / den, gy = y / den;
        if (std::abs(static_cast<double>(gx) - r.x) > 1e-8 || std::abs(static_cast<double>(gy) - r.y) > 1e-8 * r.y)
            ++bad_image;
        const auto again = reduce(r.x, r.y);
        if (again.x != r.x || again.y != r.y) ++bad_idem;
    }
    o.check(bad_gamma == 0, std::to_string(bad_gamma) + " gamma with det != 1");
    o.check(bad_domain == 0, std::to_string(bad_domain) + " images outside the fundamental domain");
    o.check(bad_image == 0, std::to_string(bad_image) + " images disagree with gamma z");
    o.check(bad_idem == 0, std::to_string(bad_idem) + " non-idempotent reductions");

    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto [x, y] = inputs[static_cast<std::size_t>(i)];
        const auto r = reduce(x, y);
        const auto e = oracle::reduce_exact(mpq_class(x), mpq_class(y));
        worst = std::max({worst, std::abs(r.x - e.x.get_d()), std::abs(r.y - e.y.get_d())});
    }
    o.check(worst <= 1e-10, "exact-oracle agreement within 1e-10");
    char buf[120];
    std::snprintf(buf, sizeof buf, "10^4 points; exact oracle on 100, max diff %.1e", worst);
    o.detail << buf;
}

void quadrature_normalization(Outcome& o)
{
    const auto h = haar_mean(Observable::constant(1.0));
    const double third_pi = std::numbers::pi / 3.0;
    o.check(rel(h.domain_mass, third_pi) <= 1e-5, "domain mass = pi/3 within 1e-5");
    o.check(std::abs(h.mean - 1.0) <= 1e-10, "haar_mean(1) = 1 within 1e-10");
    char buf[120];
    std::snprintf(buf, sizeof buf, "mass rel err %.1e, mean-1 = %.1e", rel(h.domain_mass, third_pi), h.mean - 1.0);
    o.detail << buf;
}

Observable centered_bump() { return split_observable(Observable::bump(2.0, 0.5)).centered; }

void equidistribution(Outcome& o)
{
    const auto xi = ModularPoint::parse("cusp:z=e");
    o.check(genericity(xi).generic, "xi(inf) = e is generic");
    const auto c = pair_correlation(centered_bump(), xi, 2, 3, 1000000);
    o.check(std::abs(c.target) < 1e-12, "target (int f)^2 = 0");
    o.check(std::abs(c.value) < 0.05, "|pair correlation| < 0.05");
    char buf[120];
    std::snprintf(buf, sizeof buf, "N=1e6 (p,q)=(2,3) value=%.3e bits=%d", c.value, c.precision_bits);
    o.detail << buf;
}

void disjointness_trend(Outcome& o)
{
    const auto xi = ModularPoint::parse("cusp:z=e");
    const std::vector<std::uint64_t> ladder{10000, 100000, 1000000};
    const auto mu = sieve_mobius(ladder.back());
    const auto r = mobius_disjointness_sum(xi, centered_bump(), ladder, mu);
    const double v5 = std::abs(r.ladder[1].total), v6 = std::abs(r.ladder[2].total);
    o.check(v6 < 0.02, "N=1e6 value < 0.02");
    o.check(v6 <= 1.2 * v5, "no increase above 20% from 1e5 to 1e6");
    char buf[160];
    std::snprintf(buf, sizeof buf, "|.|: 1e4 %.3e, 1e5 %.3e, 1e6 %.3e", std::abs(r.ladder[0].total), v5, v6);
    o.detail << buf;
}

void correlator_classes(Outcome& o)
{
    using K = CorrelatorClass::Kind;
    const std::vector<std::pair<PointDescriptor, K>> matrix{
        {PointDescriptor::infinity(), K::full_rational_group},
        {PointDescriptor::from_rational(mpq_class(3, 4)), K::full_rational_group},
        {PointDescriptor::quadratic_surd(1, 0, -2), K::trivial_group},
        {PointDescriptor::quadratic_surd(1, -1, -1), K::trivial_group},
        {PointDescriptor::parse("e"), K::trivial_group},
    };
    std::string groups;
    for (const auto& [z, kind] : matrix) {
        const auto c = classify_correlator(z);
        o.check(c.kind == kind, z.describe());
        groups += (groups.empty() ? "" : " ") + c.group();
    }

    std::mt19937_64 rng(oracle::kSeed);
    std::uniform_real_distribution<double> ua(-1.5, 1.5), ub(-10.0, 10.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double alpha = std::exp(ua(rng));
        const auto chk = conjugation_exponent_check(ParabolicElement::make(alpha, ub(rng), 1.0 / alpha), 1e-12);
        worst = std::max(worst, chk.max_error);
        o.check(chk.pass, "conjugation law");
    }

    std::uniform_int_distribution<long> coef(-9, 9), tn(-60, 60), un(1, 12), den(1, 7);
    int probes = 0;
    while (probes < 100) {
        const long a = coef(rng), b = coef(rng), c = coef(rng);
        const long d = b * b - 4 * a * c;
        if (a == 0 || d <= 0 || std::gcd(std::gcd(a, b), c) != 1) continue;
        const long s = std::lround(std::sqrt(static_cast<double>(d)));
        if (s * s == d) continue;
        const mpq_class t(tn(rng), den(rng)), u(un(rng), den(rng));
        if (t * t - d * u * u <= 0) continue;
        const auto el = surd_group_element(a, b, c, t, u);
        ++probes;
        o.check(el.stabilizes && !el.rational && !el.value.is_rational() && el.chi_matches,
                "probe (" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")");
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "groups {%s}; conjugation max err %.1e; %d irrational probes", groups.c_str(), worst,
                  probes);
    o.detail << buf;
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all{
        {1, "sieve oracle equivalence", 5, sieve_oracle},
        {2, "decomposition exactness", 30, decomposition_exact},
        {3, "coverage vs Mertens product", 120, coverage_mertens},
        {4, "criterion end-to-end", 180, criterion_end_to_end},
        {5, "ledger soundness", 120, ledger_soundness},
        {6, "fixed-point dynamics", 60, fixed_point},
        {7, "reduction correctness", 30, reduction},
        {8, "quadrature normalization", 60, quadrature_normalization},
        {9, "pair correlation target", 600, equidistribution},
        {10, "Mobius disjointness trend", 600, disjointness_trend},
        {11, "correlator classification", 5, correlator_classes},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const Error& e) {
            o.check(false, std::string(errc_name(e.code())) + " error: " + e.what());
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char timing[96];
        std::snprintf(timing, sizeof timing, " (%.2fs, limit %.0fs)", secs, c.limit_seconds);
        if (secs > c.limit_seconds) o.check(false, "runtime limit exceeded");
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " #" << c.id << " " << c.name << ": " << o.detail.str() << o.failed << timing
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
