#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mobhoro/arith.hpp"

namespace mobhoro {

// Parameter schedule j0 = ceil((1/alpha) (ln 1/alpha)^3), j1 = j0^2; alpha in (0, 1/e).
std::pair<int, int> default_schedule(double alpha);

struct DecompositionParams {
    std::uint64_t n = 0;  // the decomposition covers [1, n)
    double alpha = 0.0;
    int j0 = 0;
    int j1 = 0;

    double d0() const { return block_edge(alpha, j0); }
    double d1() const { return block_edge(alpha, j1); }
    // N / (1+alpha)^(j+1): Q_j is the set of admissible m strictly below this.
    double q_bound(int j) const { return static_cast<double>(n) / block_edge(alpha, j + 1); }
    int block_count() const { return j1 - j0; }

    // Validates alpha in (0, 1], j0 < j1 and D1 < n. Missing j0/j1 come from
    // default_schedule, which is only defined for alpha < 1/e.
    static DecompositionParams make(std::uint64_t n, double alpha, std::optional<int> j0 = {},
                                    std::optional<int> j1 = {});
};

enum class Membership : std::uint8_t {
    not_in_s,     // no prime factor in the open interval (D0, D1)
    in_sj,        // in S, minimal block j, exactly one P_j prime p and p^2 does not divide n
    in_s_multiple // in S, but the minimal block contributes two primes or a square
};

struct Classification {
    Membership kind = Membership::not_in_s;
    int j = -1;                // minimal block index (meaningful unless not_in_s)
    std::uint64_t prime = 0;   // the unique P_j prime for in_sj
    bool operator==(const Classification&) const = default;
};

std::string to_string(Membership m);

// Trial-division classifier against a prime table covering sqrt(n) and D1.
Classification classify(std::uint64_t n, const DecompositionParams& params, const PrimeTable& primes);

// m in Q_j: m < N/(1+alpha)^(j+1) and no prime of P_i (j0 <= i <= j) divides m.
bool q_membership(std::uint64_t m, int j, const DecompositionParams& params, const PrimeTable& primes);

struct BlockStats {
    PrimeBlock block;
    double q_bound = 0.0;
    std::uint64_t q_count = 0;             // |Q_j|
    std::uint64_t s_count = 0;             // |S_j|
    std::uint64_t multiple_count = 0;      // minimal block j but multiple divisors
    std::uint64_t pq_in_s_count = 0;       // |P_jQ_j ∩ S_j| measured by classification
    std::uint64_t pq_count = 0;            // |P_j| * |Q_j| (= |P_jQ_j| by injectivity)
    std::uint64_t s_minus_pq_count = 0;    // |S_j \ P_jQ_j|
    std::uint64_t complement_violations = 0; // S_j \ P_jQ_j elements outside the inclusion window
};

class Decomposition {
public:
    const DecompositionParams& params() const noexcept { return params_; }
    std::span<const BlockStats> blocks() const noexcept { return blocks_; }
    const BlockStats& block(int j) const { return blocks_.at(static_cast<std::size_t>(j - params_.j0)); }

    // 1 <= n < N.
    Classification at(std::uint64_t n) const;
    // True iff n = p*q with p in P_j, q in Q_j for some j (reported through j).
    bool in_product_set(std::uint64_t n, int* j = nullptr) const;
    // Sorted members of Q_j.
    std::vector<std::uint64_t> q_set(int j) const;

    std::uint64_t universe() const noexcept { return params_.n - 1; }  // |[1, N)|
    std::uint64_t not_in_s() const noexcept { return not_in_s_; }
    std::uint64_t in_s() const noexcept { return universe() - not_in_s_; }
    std::uint64_t s_total() const;            // sum_j |S_j|
    std::uint64_t multiple_total() const;     // |S \ U S_j|
    std::uint64_t s_minus_pq_total() const;   // sum_j |S_j \ P_jQ_j|
    std::uint64_t pq_total() const;           // |U P_jQ_j|
    std::uint64_t leftover() const { return universe() - pq_total(); }
    // Products p*q (p in P_j, q in Q_j) that are not classified into S_j; nonzero
    // only when a block prime equals D0 exactly.
    std::uint64_t inclusion_violations() const;

    friend Decomposition build_decomposition(const DecompositionParams&, const PrimeTable&);

private:
    struct Tag {
        std::uint32_t prime = 0;   // smallest block prime dividing n (0 if none)
        std::int16_t block = -1;   // its block index
        std::uint8_t flags = 0;
    };
    static constexpr std::uint8_t kInS = 1, kMultiple = 2;

    DecompositionParams params_;
    std::vector<BlockStats> blocks_;
    std::vector<Tag> tags_;  // index n in [0, N)
    std::uint64_t not_in_s_ = 0;
};

// Exhaustive construction over [1, N). Prime table must cover D1.
Decomposition build_decomposition(const DecompositionParams& params, const PrimeTable& primes);

struct CoverageLine {
    std::string name;        // e.g. "leftover |[1,N) \\ U P_jQ_j|"
    std::uint64_t measured = 0;
    double reference = 0.0;  // asymptotic right-hand side at this N
    bool holds = false;      // measured <= reference
};

struct CoverageReport {
    std::uint64_t n = 0;
    double alpha = 0.0;
    int j0 = 0, j1 = 0;
    double d0 = 0.0, d1 = 0.0;
    std::vector<CoverageLine> lines;
    double mertens_product = 0.0;       // prod_{D0 < l < D1} (1 - 1/l)
    double inverse_j0 = 0.0;            // asymptotic value of that product
    double complement_fraction = 0.0;   // |[1,N) \ S| / N
    double mertens_relative_gap = 0.0;  // |fraction - product| / product
    std::uint64_t inclusion_violations = 0;
    bool boundary_prime_at_d0 = false;
};

CoverageReport coverage_report(const Decomposition& d, const PrimeTable& primes);

}  // namespace mobhoro
