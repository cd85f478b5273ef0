#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mobhoro/arith.hpp"
#include "mobhoro/decomp.hpp"
#include "mobhoro/symbolic.hpp"

namespace mobhoro {

// F on [1, horizon] with |F(n)| <= 1 + 1e-12, materialised once.
class BoundedSequence {
public:
    static BoundedSequence from_values(std::string label, std::vector<std::complex<double>> values);
    // Evaluates f(n) for n in [1, horizon] in parallel; f must be thread-safe.
    static BoundedSequence generate(std::string label, std::uint64_t horizon,
                                    const std::function<std::complex<double>(std::uint64_t)>& f);
    // CSV "n,value" with consecutive n starting at 1; value is "re" or "re,im" or "re+imi".
    static BoundedSequence from_csv(const std::filesystem::path& path);

    const std::string& label() const noexcept { return label_; }
    std::uint64_t horizon() const noexcept { return values_.size() - 1; }
    std::complex<double> operator()(std::uint64_t n) const { return values_[n]; }
    const std::vector<std::complex<double>>& values() const noexcept { return values_; }

    // Copy multiplied by a unimodular constant.
    BoundedSequence rotated(std::complex<double> c) const;

private:
    std::string label_;
    std::vector<std::complex<double>> values_;  // index 0 unused
};

BoundedSequence constant_sequence(std::complex<double> c, std::uint64_t horizon);
// F(n) = exp(2 pi i n theta) with the phase n*theta reduced mod 1 in double-double.
BoundedSequence exponential_sequence(const SymbolicReal& theta, std::uint64_t horizon);

struct PairCorrelation {
    std::uint64_t p1 = 0, p2 = 0, m = 0;
    std::complex<double> sum;  // sum_{m' <= M} F(p1 m') conj F(p2 m')
    double normalized = 0.0;   // |sum| / M
};

PairCorrelation bilinear_sum(const BoundedSequence& f, std::uint64_t p1, std::uint64_t p2, std::uint64_t m);

// Correlation length per pair: either a fixed M, or floor(N / max(p1, p2)).
struct CorrelationLength {
    std::uint64_t fixed = 0;
    std::uint64_t scaled_n = 0;
    static CorrelationLength fixed_length(std::uint64_t m) { return {m, 0}; }
    static CorrelationLength scaled(std::uint64_t n) { return {0, n}; }
    std::uint64_t for_pair(std::uint64_t p1, std::uint64_t p2) const;
    std::string describe() const;
};

using PrimePair = std::pair<std::uint64_t, std::uint64_t>;

struct TauEstimate {
    double cutoff = 0.0;
    double tau_hat = 0.0;
    PrimePair worst{0, 0};
    std::vector<PairCorrelation> pairs;  // admissible pairs, p1 < p2, ascending
    std::vector<PrimePair> excluded;     // echoed exactly as given
    std::string length_policy;
};

TauEstimate tau_estimate(const BoundedSequence& f, double prime_cutoff, const CorrelationLength& length,
                         const std::vector<PrimePair>& excluded = {});

// 2 sqrt(tau ln(1/tau)) N for 0 < tau < 1.
double vinogradov_bound(double tau, double n);

std::complex<double> weighted_sum(const MultiplicativeTable& nu, const BoundedSequence& f, std::uint64_t n);

struct BlockLedger {
    int j = 0;
    std::uint64_t p_count = 0, q_count = 0;
    std::uint64_t y_max = 0;               // floor(N / (1+alpha)^j)
    std::complex<double> block_sum;        // sum_{x in P_j, y in Q_j} nu(xy) F(xy)
    std::complex<double> factored_sum;     // sum_y nu(y) sum_x nu(x) F(xy)
    double inner_abs = 0.0;                // sum_{y in Q_j} |sum_x nu(x) F(xy)|
    double cauchy_q = 0.0;                 // |Q_j|^1/2 (sum_{y in Q_j} |.|^2)^1/2
    double cauchy_extended = 0.0;          // |Q_j|^1/2 (sum_{y <= Y_j} |.|^2)^1/2
    double pair_abs = 0.0;                 // sum_{x1,x2} |sum_{y <= Y_j} F(x1 y) conj F(x2 y)|
    double cauchy_pairs = 0.0;             // |Q_j|^1/2 pair_abs^1/2
    double diagonal = 0.0;                 // x1 = x2 part of pair_abs
    double diagonal_bound = 0.0;           // |P_j| * Y_j
    double off_diagonal = 0.0;             // x1 != x2 part of pair_abs
    double block_tau = 0.0;                // max_{x1 != x2} |C(x1,x2)| / Y_j
    double split = 0.0;                    // |Q_j|^1/2 (diagonal^1/2 + off_diagonal^1/2)
};

struct ChainCheck {
    std::string line;
    std::string description;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    // Unconditional steps must hold at any finite N; the rest are hypothesis- or
    // asymptotics-dependent and only diagnosed.
    bool unconditional = true;
};

struct CriterionReport {
    std::uint64_t n = 0;
    double alpha = 0.0;
    int j0 = 0, j1 = 0;
    std::string nu_label, f_label;
    TauEstimate tau;
    double tau_floor = 0.0;      // 1 / ln(cutoff)
    double tau_effective = 0.0;  // max(tau_hat, tau_floor)
    double bound_rhs = 0.0;      // vinogradov_bound(tau_effective, N); N when tau_effective >= 1
    std::complex<double> weighted_sum;
    std::complex<double> ledger_sum;  // sum over products plus leftover
    std::uint64_t leftover_count = 0;
    std::complex<double> leftover_sum;
    std::vector<BlockLedger> blocks;
    double diagonal_total = 0.0;
    double diagonal_cauchy = 0.0;
    double diagonal_final = 0.0;
    double off_diagonal_total = 0.0;
    double off_diagonal_hypothesis = 0.0;
    std::vector<ChainCheck> checks;
    double ratio = 0.0;  // |weighted_sum| / bound_rhs
    std::string verdict; // "holds", "inconclusive", "violated"

    bool unconditional_chain_holds() const;
    std::vector<std::string> failing_lines() const;
};

struct CriterionInput {
    std::uint64_t n = 0;
    double alpha = 0.0;
    int j0 = 0, j1 = 0;
    double prime_cutoff = 0.0;
    std::vector<PrimePair> excluded;
    CorrelationLength length;  // defaults to floor(N / max(p1, p2)) when both fields are 0
};

// F must reach the largest product x*y used by the Cauchy step, at most (1+alpha) N;
// required_horizon() gives the exact value.
std::uint64_t required_horizon(const DecompositionParams& params, const PrimeTable& primes);

CriterionReport criterion_ledger(const MultiplicativeTable& nu, const BoundedSequence& f,
                                 const CriterionInput& input, const PrimeTable& primes);
CriterionReport criterion_ledger(const MultiplicativeTable& nu, const BoundedSequence& f,
                                 const CriterionInput& input, const Decomposition& decomposition,
                                 const PrimeTable& primes);

std::string verdict_for(double ratio);

}  // namespace mobhoro
