#include "mobhoro/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mobhoro/error.hpp"
#include "mobhoro/parallel.hpp"
#include "mobhoro/summation.hpp"

namespace mobhoro {

using cplx = std::complex<double>;

BoundedSequence BoundedSequence::from_values(std::string label, std::vector<cplx> values)
{
    require(values.size() >= 2, Errc::validation, "bounded sequence needs horizon >= 1");
    values[0] = 0.0;
    for (std::size_t n = 1; n < values.size(); ++n) {
        const double a = std::abs(values[n]);
        require(std::isfinite(a) && a <= 1.0 + 1e-12, Errc::validation,
                "bounded sequence '" + label + "' exceeds 1 in modulus at n=" + std::to_string(n));
    }
    BoundedSequence s;
    s.label_ = std::move(label);
    s.values_ = std::move(values);
    return s;
}

BoundedSequence BoundedSequence::generate(std::string label, std::uint64_t horizon,
                                          const std::function<cplx(std::uint64_t)>& f)
{
    require(horizon >= 1, Errc::validation, "bounded sequence needs horizon >= 1");
    std::vector<cplx> values(horizon + 1);
    parallel_for(horizon, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) values[i + 1] = f(i + 1);
    });
    return from_values(std::move(label), std::move(values));
}

BoundedSequence BoundedSequence::from_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    require(static_cast<bool>(in), Errc::io, "cannot open sequence table " + path.string());
    std::vector<cplx> values{0.0};
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("n,", 0) == 0) continue;  // header
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        require(cells.size() == 2 || cells.size() == 3, Errc::validation,
                "sequence table: expected n,value or n,re,im in '" + line + "'");
        const auto n = std::stoull(cells[0]);
        require(n == values.size(), Errc::validation,
                "sequence table: indices must be consecutive from 1 (got " + cells[0] + ")");
        if (cells.size() == 3) {
            values.emplace_back(std::stod(cells[1]), std::stod(cells[2]));
            continue;
        }
        const char* s = cells[1].c_str();
        char* end = nullptr;
        const double re = std::strtod(s, &end);
        double im = 0.0;
        if (*end == '+' || *end == '-') {
            const char* s2 = end;
            im = std::strtod(s2, &end);
            require(*end == 'i', Errc::validation, "sequence table: malformed complex '" + cells[1] + "'");
        }
        values.emplace_back(re, im);
    }
    return from_values("table:" + path.string(), std::move(values));
}

BoundedSequence BoundedSequence::rotated(cplx c) const
{
    std::vector<cplx> v = values_;
    for (auto& x : v) x *= c;
    return from_values(label_ + "*c", std::move(v));
}

BoundedSequence constant_sequence(cplx c, std::uint64_t horizon)
{
    std::ostringstream label;
    label << "const:" << c.real();
    if (c.imag() != 0.0) label << (c.imag() > 0 ? "+" : "") << c.imag() << "i";
    return BoundedSequence::from_values(label.str(), std::vector<cplx>(horizon + 1, c));
}

BoundedSequence exponential_sequence(const SymbolicReal& theta, std::uint64_t horizon)
{
    const DoubleDouble t = to_double_double(theta);
    return BoundedSequence::generate("exp:theta=" + theta.to_string(), horizon, [t](std::uint64_t n) {
        const double f = fractional_product(t, static_cast<std::int64_t>(n));
        const double angle = 2.0 * std::numbers::pi * f;
        return cplx(std::cos(angle), std::sin(angle));
    });
}

PairCorrelation bilinear_sum(const BoundedSequence& f, std::uint64_t p1, std::uint64_t p2, std::uint64_t m)
{
    require(p1 >= 1 && p2 >= 1 && p1 != p2, Errc::validation, "bilinear_sum: need distinct p1, p2 >= 1");
    require(m >= 1, Errc::validation, "bilinear_sum: M must be >= 1");
    require(std::max(p1, p2) <= f.horizon() / m, Errc::horizon,
            "bilinear_sum: max(p1,p2)*M exceeds the sequence horizon");
    PairCorrelation c;
    c.p1 = p1;
    c.p2 = p2;
    c.m = m;
    c.sum = pairwise_sum_of<cplx>(1, m + 1, [&](std::size_t k) {
        return f(p1 * k) * std::conj(f(p2 * k));
    });
    c.normalized = std::abs(c.sum) / static_cast<double>(m);
    return c;
}

std::uint64_t CorrelationLength::for_pair(std::uint64_t p1, std::uint64_t p2) const
{
    if (fixed != 0) return fixed;
    return scaled_n / std::max(p1, p2);
}

std::string CorrelationLength::describe() const
{
    if (fixed != 0) return "fixed M=" + std::to_string(fixed);
    return "M=floor(" + std::to_string(scaled_n) + "/max(p1,p2))";
}

namespace {

bool is_excluded(const std::vector<PrimePair>& excluded, std::uint64_t a, std::uint64_t b)
{
    return std::any_of(excluded.begin(), excluded.end(), [&](const PrimePair& e) {
        return (e.first == a && e.second == b) || (e.first == b && e.second == a);
    });
}

}  // namespace

TauEstimate tau_estimate(const BoundedSequence& f, double prime_cutoff, const CorrelationLength& length,
                         const std::vector<PrimePair>& excluded)
{
    require(prime_cutoff >= 3.0, Errc::validation, "tau_estimate: cutoff < 3 leaves no pair of primes");
    require(length.fixed != 0 || length.scaled_n != 0, Errc::validation,
            "tau_estimate: correlation length not set");
    const auto table = sieve_primes(static_cast<std::uint64_t>(std::floor(prime_cutoff)));
    const auto ps = table.primes();

    TauEstimate t;
    t.cutoff = prime_cutoff;
    t.excluded = excluded;
    t.length_policy = length.describe();
    std::vector<PrimePair> todo;
    for (std::size_t a = 0; a < ps.size(); ++a)
        for (std::size_t b = a + 1; b < ps.size(); ++b)
            if (!is_excluded(excluded, ps[a], ps[b])) todo.emplace_back(ps[a], ps[b]);
    require(!todo.empty(), Errc::validation, "tau_estimate: every pair below the cutoff is excluded");

    t.pairs.resize(todo.size());
    parallel_for(todo.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto [p1, p2] = todo[i];
            const auto m = length.for_pair(p1, p2);
            require(m >= 1, Errc::horizon, "tau_estimate: correlation length is zero for a pair");
            t.pairs[i] = bilinear_sum(f, p1, p2, m);
        }
    });
    for (const auto& c : t.pairs) {
        if (c.normalized > t.tau_hat || t.worst.first == 0) {
            t.tau_hat = c.normalized;
            t.worst = {c.p1, c.p2};
        }
    }
    return t;
}

double vinogradov_bound(double tau, double n)
{
    require(tau > 0.0 && tau < 1.0, Errc::domain, "vinogradov_bound: tau must lie in (0, 1)");
    return 2.0 * std::sqrt(tau * std::log(1.0 / tau)) * n;
}

cplx weighted_sum(const MultiplicativeTable& nu, const BoundedSequence& f, std::uint64_t n)
{
    require(nu.n_max() >= n && f.horizon() >= n, Errc::horizon,
            "weighted_sum: nu or F not defined up to N");
    return pairwise_sum_of<cplx>(1, n + 1, [&](std::size_t k) { return nu(k) * f(k); });
}

std::string verdict_for(double ratio)
{
    if (ratio <= 0.9) return "holds";
    if (ratio > 1.1) return "violated";
    return "inconclusive";
}

bool CriterionReport::unconditional_chain_holds() const
{
    return std::all_of(checks.begin(), checks.end(),
                       [](const ChainCheck& c) { return !c.unconditional || c.holds; });
}

std::vector<std::string> CriterionReport::failing_lines() const
{
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.holds) out.push_back(c.line);
    return out;
}

namespace {

std::uint64_t y_limit(const DecompositionParams& p, int j)
{
    return static_cast<std::uint64_t>(std::floor(static_cast<double>(p.n) / block_edge(p.alpha, j)));
}

bool leq(double lhs, double rhs)
{
    return lhs <= rhs + 1e-12 * std::max(std::abs(lhs), std::abs(rhs)) + 1e-9;
}

}  // namespace

std::uint64_t required_horizon(const DecompositionParams& params, const PrimeTable& primes)
{
    std::uint64_t need = params.n;
    for (int j = params.j0; j < params.j1; ++j) {
        const auto block = prime_blocks(params.alpha, j, j, primes).front();
        if (block.primes.empty()) continue;
        need = std::max(need, block.primes.back() * y_limit(params, j));
    }
    return need;
}

CriterionReport criterion_ledger(const MultiplicativeTable& nu, const BoundedSequence& f,
                                 const CriterionInput& input, const PrimeTable& primes)
{
    const auto params = DecompositionParams::make(input.n, input.alpha, input.j0, input.j1);
    return criterion_ledger(nu, f, input, build_decomposition(params, primes), primes);
}

CriterionReport criterion_ledger(const MultiplicativeTable& nu, const BoundedSequence& f,
                                 const CriterionInput& input, const Decomposition& decomposition,
                                 const PrimeTable& primes)
{
    const auto& params = decomposition.params();
    require(params.n == input.n && params.j0 == input.j0 && params.j1 == input.j1 &&
                params.alpha == input.alpha,
            Errc::validation, "criterion_ledger: decomposition does not match the input parameters");
    const std::uint64_t n = params.n;
    require(nu.n_max() >= n, Errc::horizon, "criterion_ledger: nu not defined up to N");
    const std::uint64_t horizon = required_horizon(params, primes);
    require(f.horizon() >= horizon, Errc::horizon,
            "criterion_ledger: F must be defined up to " + std::to_string(horizon) +
                " (largest product used by the Cauchy step)");

    CriterionReport r;
    r.n = n;
    r.alpha = params.alpha;
    r.j0 = params.j0;
    r.j1 = params.j1;
    r.nu_label = nu.label();
    r.f_label = f.label();

    r.weighted_sum = weighted_sum(nu, f, n);
    const CorrelationLength length =
        (input.length.fixed == 0 && input.length.scaled_n == 0) ? CorrelationLength::scaled(n) : input.length;
    r.tau = tau_estimate(f, input.prime_cutoff, length, input.excluded);
    r.tau_floor = 1.0 / std::log(input.prime_cutoff);
    r.tau_effective = std::max(r.tau.tau_hat, r.tau_floor);
    // No nontrivial bound once tau reaches 1; fall back to |sum| <= N.
    r.bound_rhs = r.tau_effective < 1.0 ? vinogradov_bound(r.tau_effective, static_cast<double>(n))
                                        : static_cast<double>(n);

    const auto block_span = decomposition.blocks();
    const std::size_t nb = block_span.size();
    std::vector<std::vector<std::uint64_t>> q_sets(nb);
    std::vector<std::uint8_t> covered(n + 1, 0);
    for (std::size_t b = 0; b < nb; ++b) {
        q_sets[b] = decomposition.q_set(params.j0 + static_cast<int>(b));
        for (std::uint64_t x : block_span[b].block.primes)
            for (std::uint64_t y : q_sets[b]) covered[x * y] = 1;
    }

    r.blocks.resize(nb);
    parallel_for(nb, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t b = lo; b < hi; ++b) {
            const auto& xs = block_span[b].block.primes;
            const auto& qs = q_sets[b];
            BlockLedger& L = r.blocks[b];
            L.j = params.j0 + static_cast<int>(b);
            L.p_count = xs.size();
            L.q_count = qs.size();
            L.y_max = y_limit(params, L.j);
            const double qroot = std::sqrt(static_cast<double>(qs.size()));

            const std::size_t nq = qs.size();
            L.block_sum = pairwise_sum_of<cplx>(0, xs.size() * nq, [&](std::size_t i) {
                const std::uint64_t m = xs[i / nq] * qs[i % nq];
                return nu(m) * f(m);
            });

            std::vector<cplx> inner(L.y_max + 1, 0.0);
            for (std::uint64_t y = 1; y <= L.y_max; ++y)
                inner[y] = pairwise_sum_of<cplx>(0, xs.size(), [&](std::size_t i) {
                    return nu(xs[i]) * f(xs[i] * y);
                });
            L.factored_sum = pairwise_sum_of<cplx>(0, nq, [&](std::size_t i) { return nu(qs[i]) * inner[qs[i]]; });
            L.inner_abs = pairwise_sum_of<double>(0, nq, [&](std::size_t i) { return std::abs(inner[qs[i]]); });
            const double sq_q = pairwise_sum_of<double>(0, nq, [&](std::size_t i) { return std::norm(inner[qs[i]]); });
            const double sq_all = pairwise_sum_of<double>(1, L.y_max + 1, [&](std::size_t y) { return std::norm(inner[y]); });
            L.cauchy_q = qroot * std::sqrt(sq_q);
            L.cauchy_extended = qroot * std::sqrt(sq_all);

            const double ymax = static_cast<double>(L.y_max);
            for (std::size_t a = 0; a < xs.size(); ++a) {
                for (std::size_t c = a; c < xs.size(); ++c) {
                    const cplx corr = pairwise_sum_of<cplx>(1, L.y_max + 1, [&](std::size_t y) {
                        return f(xs[a] * y) * std::conj(f(xs[c] * y));
                    });
                    if (a == c) {
                        L.diagonal += corr.real();
                    } else {
                        L.off_diagonal += 2.0 * std::abs(corr);
                        if (ymax > 0) L.block_tau = std::max(L.block_tau, std::abs(corr) / ymax);
                    }
                }
            }
            L.pair_abs = L.diagonal + L.off_diagonal;
            L.cauchy_pairs = qroot * std::sqrt(L.pair_abs);
            L.diagonal_bound = static_cast<double>(xs.size()) * ymax;
            L.split = qroot * (std::sqrt(L.diagonal) + std::sqrt(L.off_diagonal));
        }
    });

    r.leftover_sum = pairwise_sum_of<cplx>(1, n + 1, [&](std::size_t k) {
        return covered[k] ? cplx(0.0) : nu(k) * f(k);
    });
    r.leftover_count = static_cast<std::uint64_t>(std::count(covered.begin() + 1, covered.end(), 0));

    cplx products{0.0};
    double abs_blocks = 0, abs_factored = 0, inner_abs = 0, cauchy_q = 0, cauchy_ext = 0, cauchy_pairs = 0;
    double split = 0, diag_terms = 0, pq = 0, inv_powers = 0, off_hyp = 0, max_factor_gap = 0;
    bool all_cauchy = true, all_extend = true, all_expand = true, all_diag = true, all_split = true, all_off = true;
    double max_block_tau = 0, diag_lhs = 0, diag_rhs = 0, off_lhs = 0, off_rhs = 0;
    for (const auto& L : r.blocks) {
        const double qroot = std::sqrt(static_cast<double>(L.q_count));
        const double edge = block_edge(params.alpha, L.j);
        products += L.block_sum;
        abs_blocks += std::abs(L.block_sum);
        abs_factored += std::abs(L.factored_sum);
        max_factor_gap = std::max(max_factor_gap, std::abs(L.block_sum - L.factored_sum));
        inner_abs += L.inner_abs;
        cauchy_q += L.cauchy_q;
        cauchy_ext += L.cauchy_extended;
        cauchy_pairs += L.cauchy_pairs;
        split += L.split;
        all_cauchy = all_cauchy && leq(L.inner_abs, L.cauchy_q);
        all_extend = all_extend && leq(L.cauchy_q, L.cauchy_extended);
        all_expand = all_expand && leq(L.cauchy_extended, L.cauchy_pairs);
        all_diag = all_diag && leq(L.diagonal, L.diagonal_bound);
        all_split = all_split && leq(L.cauchy_pairs, L.split);
        const double pc = static_cast<double>(L.p_count);
        const double off_majorant = pc * (pc - 1.0) * L.block_tau * static_cast<double>(L.y_max);
        all_off = all_off && leq(L.off_diagonal, 2.0 * off_majorant / 2.0);
        off_lhs += L.off_diagonal;
        off_rhs += off_majorant;
        diag_lhs += L.diagonal;
        diag_rhs += L.diagonal_bound;
        max_block_tau = std::max(max_block_tau, L.block_tau);
        r.diagonal_total += qroot * std::sqrt(L.diagonal);
        r.off_diagonal_total += qroot * std::sqrt(L.off_diagonal);
        diag_terms += qroot * std::sqrt(L.diagonal_bound);
        pq += static_cast<double>(L.p_count) * static_cast<double>(L.q_count);
        inv_powers += 1.0 / edge;
        off_hyp += pc * qroot / std::sqrt(edge);
    }
    r.ledger_sum = products + r.leftover_sum;
    const double nd = static_cast<double>(n);
    r.diagonal_cauchy = std::sqrt(nd) * std::sqrt(pq) * std::sqrt(inv_powers);
    r.diagonal_final = nd * std::sqrt(inv_powers);
    r.off_diagonal_hypothesis = std::sqrt(r.tau_effective * nd) * off_hyp;

    const double w = std::abs(r.weighted_sum);
    const double left = std::abs(r.leftover_sum);
    auto add = [&](std::string line, std::string what, double lhs, double rhs, bool holds, bool unconditional) {
        r.checks.push_back({std::move(line), std::move(what), lhs, rhs, holds, unconditional});
    };
    const double identity_gap = std::abs(r.weighted_sum - r.ledger_sum);
    add("ledger identity", "direct sum equals sum over P_jQ_j plus leftover", identity_gap, 1e-10 * nd,
        identity_gap <= 1e-10 * nd, true);
    add("block split triangle", "|sum| <= sum_j |block sums| + |leftover sum|", w, abs_blocks + left,
        leq(w, abs_blocks + left), true);
    add("leftover trivial", "|leftover sum| <= leftover count", left, static_cast<double>(r.leftover_count),
        leq(left, static_cast<double>(r.leftover_count)), true);
    add("factorisation", "nu(xy) = nu(x) nu(y) on P_j x Q_j", max_factor_gap, 1e-10 * nd,
        max_factor_gap <= 1e-10 * nd, true);
    add("inner triangle", "sum_j |factored| <= sum_j sum_y |sum_x nu(x) F(xy)|", abs_factored, inner_abs,
        leq(abs_factored, inner_abs), true);
    add("Cauchy over y", "sum_y |I_y| <= |Q_j|^1/2 (sum_{y in Q_j} |I_y|^2)^1/2", inner_abs, cauchy_q,
        all_cauchy, true);
    add("Cauchy range", "extend y from Q_j to y <= N/(1+a)^j", cauchy_q, cauchy_ext, all_extend, true);
    add("square expansion", "expand the square and use |nu| <= 1", cauchy_ext, cauchy_pairs, all_expand, true);
    add("diagonal", "sum_x sum_y |F(xy)|^2 <= |P_j| N/(1+a)^j", diag_lhs, diag_rhs, all_diag, true);
    add("sqrt split", "sqrt(D+O) <= sqrt(D) + sqrt(O)", cauchy_pairs, split, all_split, true);
    add("off-diagonal majorant", "off-diagonal <= |P_j|(|P_j|-1) tau_j Y_j (measured tau_j)", off_lhs, off_rhs,
        all_off, true);
    add("Cauchy over j", "sum_j |Q_j|^1/2 (|P_j| Y_j)^1/2 <= sqrt(N) (sum |P_j||Q_j|)^1/2 (sum (1+a)^-j)^1/2",
        diag_terms, r.diagonal_cauchy, leq(diag_terms, r.diagonal_cauchy), true);
    add("disjoint products", "sum_j |P_j||Q_j| <= N", pq, nd, leq(pq, nd), true);
    add("composed chain", "|sum| <= sum_j |Q_j|^1/2 (D_j^1/2 + O_j^1/2) + |leftover sum|", w, split + left,
        leq(w, split + left), true);

    add("correlation hypothesis on blocks", "max block pair correlation <= tau_eff", max_block_tau, r.tau_effective,
        max_block_tau <= r.tau_effective, false);
    add("off-diagonal hypothesis", "off-diagonal <= sqrt(tau N) sum_j |P_j||Q_j|^1/2 (1+a)^-j/2", r.off_diagonal_total,
        r.off_diagonal_hypothesis, leq(r.off_diagonal_total, r.off_diagonal_hypothesis), false);
    add("leftover asymptotic", "leftover count <= 3 alpha N", static_cast<double>(r.leftover_count),
        3.0 * params.alpha * nd, static_cast<double>(r.leftover_count) <= 3.0 * params.alpha * nd, false);
    add("diagonal asymptotic", "N (sum_j (1+a)^-j)^1/2 <= alpha N", r.diagonal_final, params.alpha * nd,
        r.diagonal_final <= params.alpha * nd, false);
    const double log_inv_alpha = params.alpha < 1.0 ? std::log(1.0 / params.alpha) : 0.0;
    const double off_asym = nd * std::sqrt(r.tau_effective * log_inv_alpha);
    add("off-diagonal asymptotic", "sqrt(tau N) sum_j ... <= N sqrt(tau log 1/alpha)", r.off_diagonal_hypothesis,
        off_asym, r.off_diagonal_hypothesis <= off_asym, false);
    const double final_rhs = nd * (4.0 * params.alpha + std::sqrt(r.tau_effective * log_inv_alpha));
    add("final asymptotic", "|sum| <= N (4 alpha + sqrt(tau log 1/alpha))", w, final_rhs, w <= final_rhs, false);

    r.ratio = w / r.bound_rhs;
    r.verdict = r.tau_effective < 1.0 ? verdict_for(r.ratio) : "inconclusive";
    return r;
}

}  // namespace mobhoro
