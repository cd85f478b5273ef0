#include "mobhoro/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mobhoro/error.hpp"
#include "mobhoro/summation.hpp"

namespace mobhoro {

namespace {

constexpr std::uint64_t kSegment = std::uint64_t{1} << 16;

void check_budget(std::uint64_t n_max, std::uint64_t bytes_per_entry, const SieveBudget& budget,
                  const char* what)
{
    if (n_max > budget.max_bytes / bytes_per_entry) {
        fail(Errc::capacity, std::string(what) + ": n_max=" + std::to_string(n_max) +
                                 " exceeds the memory budget of " +
                                 std::to_string(budget.max_bytes) + " bytes");
    }
}

std::uint64_t isqrt(std::uint64_t n)
{
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// Primes up to `limit` by a plain sieve; limit is at most sqrt of the target.
std::vector<std::uint64_t> small_primes(std::uint64_t limit)
{
    std::vector<std::uint64_t> out;
    if (limit < 2) return out;
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t m = i * i; m <= limit; m += i) composite[m] = true;
    }
    return out;
}

std::uint64_t first_multiple(std::uint64_t p, std::uint64_t lo)
{
    return ((lo + p - 1) / p) * p;
}

}  // namespace

bool PrimeTable::is_prime(std::uint64_t n) const
{
    require(n <= n_max_, Errc::range, "is_prime: n beyond prime table");
    return std::binary_search(primes_.begin(), primes_.end(), n);
}

std::span<const std::uint64_t> PrimeTable::range(std::uint64_t lo, std::uint64_t hi) const
{
    auto first = std::lower_bound(primes_.begin(), primes_.end(), lo);
    auto last = std::lower_bound(first, primes_.end(), hi);
    return {std::to_address(first), static_cast<std::size_t>(last - first)};
}

PrimeTable sieve_primes(std::uint64_t n_max, const SieveBudget& budget)
{
    require(n_max >= 2, Errc::validation, "sieve_primes: n_max must be >= 2");
    // ~ n / ln n primes of 8 bytes each; use the crude bound n/8 entries.
    check_budget(n_max / 8 + 1, sizeof(std::uint64_t), budget, "sieve_primes");

    const std::uint64_t root = isqrt(n_max);
    const auto base = small_primes(root);
    std::vector<std::uint64_t> primes;
    primes.reserve(static_cast<std::size_t>(1.26 * n_max / std::log(static_cast<double>(n_max))) + 16);

    std::vector<std::uint8_t> composite(kSegment);
    for (std::uint64_t lo = 2; lo <= n_max; lo += kSegment) {
        const std::uint64_t hi = std::min(n_max + 1, lo + kSegment);
        std::fill(composite.begin(), composite.end(), 0);
        for (std::uint64_t p : base) {
            if (p * p >= hi) break;
            for (std::uint64_t m = std::max(p * p, first_multiple(p, lo)); m < hi; m += p)
                composite[m - lo] = 1;
        }
        for (std::uint64_t n = lo; n < hi; ++n)
            if (!composite[n - lo]) primes.push_back(n);
    }
    return PrimeTable(n_max, std::move(primes));
}

MultiplicativeTable MultiplicativeTable::from_signs(std::string label,
                                                    std::vector<std::int8_t> values)
{
    require(values.size() >= 2, Errc::validation, "multiplicative table needs n_max >= 1");
    require(values[1] == 1, Errc::validation, "multiplicative table must have value 1 at n=1");
    MultiplicativeTable t;
    t.label_ = std::move(label);
    t.n_max_ = values.size() - 1;
    t.signs_ = std::move(values);
    return t;
}

MultiplicativeTable MultiplicativeTable::from_complex(std::string label,
                                                      std::vector<std::complex<double>> values)
{
    require(values.size() >= 2, Errc::validation, "multiplicative table needs n_max >= 1");
    require(std::abs(values[1] - 1.0) <= 1e-12, Errc::validation,
            "multiplicative table must have value 1 at n=1");
    for (std::size_t n = 1; n < values.size(); ++n)
        require(std::abs(values[n]) <= 1.0 + 1e-12, Errc::validation,
                "multiplicative table value exceeds 1 in modulus at n=" + std::to_string(n));
    MultiplicativeTable t;
    t.label_ = std::move(label);
    t.n_max_ = values.size() - 1;
    t.complex_ = std::move(values);
    return t;
}

std::complex<double> MultiplicativeTable::partial_sum(std::uint64_t upto) const
{
    require(upto <= n_max_, Errc::horizon, "partial_sum beyond table");
    return pairwise_sum_of<std::complex<double>>(1, upto + 1,
                                                 [this](std::size_t n) { return (*this)(n); });
}

MultiplicativeTable sieve_mobius(std::uint64_t n_max, const SieveBudget& budget)
{
    require(n_max >= 1, Errc::validation, "sieve_mobius: n_max must be >= 1");
    check_budget(n_max + 1, 1, budget, "sieve_mobius");
    const auto base = small_primes(isqrt(n_max));
    std::vector<std::int8_t> mu(n_max + 1, 0);
    std::vector<std::uint64_t> prod(kSegment);
    std::vector<std::int8_t> seg(kSegment);

    for (std::uint64_t lo = 1; lo <= n_max; lo += kSegment) {
        const std::uint64_t hi = std::min(n_max + 1, lo + kSegment);
        std::fill(prod.begin(), prod.end(), 1);
        std::fill(seg.begin(), seg.end(), 1);
        for (std::uint64_t p : base) {
            if (p >= hi) break;
            for (std::uint64_t m = first_multiple(p, lo); m < hi; m += p) {
                seg[m - lo] = static_cast<std::int8_t>(-seg[m - lo]);
                prod[m - lo] *= p;
            }
            const std::uint64_t p2 = p * p;
            if (p2 < hi)
                for (std::uint64_t m = first_multiple(p2, lo); m < hi; m += p2) seg[m - lo] = 0;
        }
        for (std::uint64_t n = lo; n < hi; ++n) {
            std::int8_t v = seg[n - lo];
            // A squarefree n has at most one prime factor above sqrt(n_max).
            if (v != 0 && prod[n - lo] != n) v = static_cast<std::int8_t>(-v);
            mu[n] = v;
        }
    }
    return MultiplicativeTable::from_signs("mobius", std::move(mu));
}

MultiplicativeTable sieve_liouville(std::uint64_t n_max, const SieveBudget& budget)
{
    require(n_max >= 1, Errc::validation, "sieve_liouville: n_max must be >= 1");
    check_budget(n_max + 1, 1, budget, "sieve_liouville");
    const auto base = small_primes(isqrt(n_max));
    std::vector<std::int8_t> lambda(n_max + 1, 0);
    std::vector<std::uint64_t> prod(kSegment);
    std::vector<std::int8_t> seg(kSegment);

    for (std::uint64_t lo = 1; lo <= n_max; lo += kSegment) {
        const std::uint64_t hi = std::min(n_max + 1, lo + kSegment);
        std::fill(prod.begin(), prod.end(), 1);
        std::fill(seg.begin(), seg.end(), 1);
        for (std::uint64_t p : base) {
            if (p >= hi) break;
            // Each power p^k dividing n flips the sign once: total flips = v_p(n).
            for (std::uint64_t pk = p; pk < hi; pk *= p) {
                for (std::uint64_t m = first_multiple(pk, lo); m < hi; m += pk) {
                    seg[m - lo] = static_cast<std::int8_t>(-seg[m - lo]);
                    prod[m - lo] *= p;
                }
                if (pk > (hi - 1) / p) break;
            }
        }
        for (std::uint64_t n = lo; n < hi; ++n) {
            std::int8_t v = seg[n - lo];
            if (prod[n - lo] != n) v = static_cast<std::int8_t>(-v);
            lambda[n] = v;
        }
    }
    return MultiplicativeTable::from_signs("liouville", std::move(lambda));
}

MultiplicativeTable sieve_multiplicative(std::uint64_t n_max, std::string label,
                                         const PrimePowerValue& at_prime_power,
                                         const SieveBudget& budget)
{
    require(n_max >= 1, Errc::validation, "sieve_multiplicative: n_max must be >= 1");
    check_budget(n_max + 1, sizeof(std::complex<double>), budget, "sieve_multiplicative");
    const auto base = small_primes(isqrt(n_max));
    std::vector<std::complex<double>> values(n_max + 1, 0.0);
    std::vector<std::uint64_t> rest(kSegment);

    for (std::uint64_t lo = 1; lo <= n_max; lo += kSegment) {
        const std::uint64_t hi = std::min(n_max + 1, lo + kSegment);
        for (std::uint64_t n = lo; n < hi; ++n) {
            rest[n - lo] = n;
            values[n] = 1.0;
        }
        for (std::uint64_t p : base) {
            if (p >= hi) break;
            for (std::uint64_t m = first_multiple(p, lo); m < hi; m += p) {
                int k = 0;
                while (rest[m - lo] % p == 0) {
                    rest[m - lo] /= p;
                    ++k;
                }
                values[m] *= at_prime_power(p, k);
            }
        }
        for (std::uint64_t n = lo; n < hi; ++n)
            if (rest[n - lo] > 1) values[n] *= at_prime_power(rest[n - lo], 1);
    }
    return MultiplicativeTable::from_complex(std::move(label), std::move(values));
}

void write_csv(const MultiplicativeTable& table, std::ostream& out)
{
    out << "n,value\n";
    char buf[96];
    for (std::uint64_t n = 1; n <= table.n_max(); ++n) {
        if (table.is_signed()) {
            out << n << ',' << static_cast<int>(table.sign(n)) << '\n';
            continue;
        }
        const auto v = table(n);
        if (v.imag() == 0.0)
            std::snprintf(buf, sizeof buf, "%.17g", v.real());
        else
            std::snprintf(buf, sizeof buf, "%.17g%+.17gi", v.real(), v.imag());
        out << n << ',' << buf << '\n';
    }
}

double block_edge(double alpha, int j) { return std::pow(1.0 + alpha, j); }

int block_index(double alpha, double x)
{
    int j = static_cast<int>(std::floor(std::log(x) / std::log1p(alpha)));
    while (block_edge(alpha, j) > x) --j;
    while (block_edge(alpha, j + 1) <= x) ++j;
    return j;
}

std::vector<PrimeBlock> prime_blocks(double alpha, int j_lo, int j_hi, const PrimeTable& primes)
{
    require(alpha > 0.0 && alpha <= 1.0, Errc::validation, "prime_blocks: alpha must lie in (0, 1]");
    require(j_lo <= j_hi, Errc::validation, "prime_blocks: j_lo must not exceed j_hi");
    require(block_edge(alpha, j_hi + 1) <= static_cast<double>(primes.n_max()), Errc::range,
            "prime_blocks: prime table too small for the requested blocks");

    std::vector<PrimeBlock> blocks;
    blocks.reserve(static_cast<std::size_t>(j_hi - j_lo + 1));
    for (int j = j_lo; j <= j_hi; ++j) {
        PrimeBlock b;
        b.j = j;
        b.lo = block_edge(alpha, j);
        b.hi = block_edge(alpha, j + 1);
        // Integer bounds equivalent to lo <= p < hi for integer p.
        const auto ilo = static_cast<std::uint64_t>(std::ceil(b.lo));
        const auto ihi = static_cast<std::uint64_t>(std::ceil(b.hi));
        const auto span = primes.range(ilo, ihi);
        b.primes.assign(span.begin(), span.end());
        blocks.push_back(std::move(b));
    }
    return blocks;
}

}  // namespace mobhoro
