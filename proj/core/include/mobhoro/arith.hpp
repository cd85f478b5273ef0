#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mobhoro {

// Upper bound on the memory a single table may occupy. Exceeding it raises
// Errc::capacity before any allocation happens.
struct SieveBudget {
    std::uint64_t max_bytes = std::uint64_t{2} << 30;
};

class PrimeTable {
public:
    PrimeTable() = default;
    PrimeTable(std::uint64_t n_max, std::vector<std::uint64_t> primes)
        : n_max_(n_max), primes_(std::move(primes)) {}

    std::uint64_t n_max() const noexcept { return n_max_; }
    std::span<const std::uint64_t> primes() const noexcept { return primes_; }
    std::size_t size() const noexcept { return primes_.size(); }

    // Binary search; n must be <= n_max.
    bool is_prime(std::uint64_t n) const;
    // Primes p with lo <= p < hi (hi clamped to n_max + 1).
    std::span<const std::uint64_t> range(std::uint64_t lo, std::uint64_t hi) const;

private:
    std::uint64_t n_max_ = 0;
    std::vector<std::uint64_t> primes_;
};

PrimeTable sieve_primes(std::uint64_t n_max, const SieveBudget& budget = {});

// Values of a multiplicative function with |v| <= 1 on [1, n_max]. Functions with
// values in {-1, 0, 1} are stored one byte per entry; anything else as complex.
class MultiplicativeTable {
public:
    static MultiplicativeTable from_signs(std::string label, std::vector<std::int8_t> values);
    static MultiplicativeTable from_complex(std::string label,
                                            std::vector<std::complex<double>> values);

    const std::string& label() const noexcept { return label_; }
    std::uint64_t n_max() const noexcept { return n_max_; }
    bool is_signed() const noexcept { return complex_.empty(); }

    // 1 <= n <= n_max.
    std::complex<double> operator()(std::uint64_t n) const
    {
        return is_signed() ? std::complex<double>(signs_[n], 0.0) : complex_[n];
    }
    std::int8_t sign(std::uint64_t n) const { return signs_[n]; }

    // Partial sum over 1 <= n <= upto, pairwise summation.
    std::complex<double> partial_sum(std::uint64_t upto) const;

private:
    std::string label_;
    std::uint64_t n_max_ = 0;
    std::vector<std::int8_t> signs_;                // index 0 unused
    std::vector<std::complex<double>> complex_;     // index 0 unused
};

MultiplicativeTable sieve_mobius(std::uint64_t n_max, const SieveBudget& budget = {});
MultiplicativeTable sieve_liouville(std::uint64_t n_max, const SieveBudget& budget = {});

// General multiplicative function given by its values at prime powers p^k.
using PrimePowerValue = std::function<std::complex<double>(std::uint64_t p, int k)>;
MultiplicativeTable sieve_multiplicative(std::uint64_t n_max, std::string label,
                                         const PrimePowerValue& at_prime_power,
                                         const SieveBudget& budget = {});

// CSV with header "n,value"; signed tables print integers, complex tables print
// "re" or "re+imi" with 17 significant digits.
void write_csv(const MultiplicativeTable& table, std::ostream& out);

// (1+alpha)^j. Every block boundary comparison in the library goes through this.
double block_edge(double alpha, int j);

// The j with block_edge(j) <= x < block_edge(j+1).
int block_index(double alpha, double x);

struct PrimeBlock {
    int j = 0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> primes;  // lo <= p < hi
};

// Blocks j_lo..j_hi inclusive; requires block_edge(alpha, j_hi + 1) <= primes.n_max().
std::vector<PrimeBlock> prime_blocks(double alpha, int j_lo, int j_hi, const PrimeTable& primes);

}  // namespace mobhoro
