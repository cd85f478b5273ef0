#include "mobhoro/decomp.hpp"

#include <algorithm>
#include <cmath>

#include "mobhoro/error.hpp"
#include "mobhoro/parallel.hpp"

namespace mobhoro {

std::pair<int, int> default_schedule(double alpha)
{
    const double e_inv = std::exp(-1.0);
    require(alpha > 0.0 && alpha < e_inv, Errc::domain,
            "default_schedule: alpha must lie in (0, 1/e) so that log(1/alpha) > 1");
    const double l = std::log(1.0 / alpha);
    const double raw = (1.0 / alpha) * l * l * l;
    require(raw < 46340.0, Errc::capacity, "default_schedule: j0^2 overflows int");
    const int j0 = static_cast<int>(std::ceil(raw));
    return {j0, j0 * j0};
}

DecompositionParams DecompositionParams::make(std::uint64_t n, double alpha, std::optional<int> j0,
                                              std::optional<int> j1)
{
    require(n >= 2, Errc::validation, "decomposition: N must be >= 2");
    require(alpha > 0.0 && alpha <= 1.0, Errc::validation, "decomposition: alpha must lie in (0, 1]");
    DecompositionParams p;
    p.n = n;
    p.alpha = alpha;
    if (!j0 || !j1) {
        const auto [d0, d1] = default_schedule(alpha);
        p.j0 = j0.value_or(d0);
        p.j1 = j1.value_or(d1);
    } else {
        p.j0 = *j0;
        p.j1 = *j1;
    }
    require(p.j0 >= 0, Errc::validation, "decomposition: j0 must be >= 0");
    require(p.j0 < p.j1, Errc::validation, "decomposition: j0 must be < j1");
    require(p.j1 < 32767, Errc::validation, "decomposition: j1 too large");
    require(p.d1() < static_cast<double>(n), Errc::validation,
            "decomposition: D1 = (1+alpha)^j1 must be < N");
    return p;
}

std::string to_string(Membership m)
{
    switch (m) {
    case Membership::not_in_s: return "NotInS";
    case Membership::in_sj: return "InSj";
    case Membership::in_s_multiple: return "InSButMultiple";
    }
    return "?";
}

namespace {

struct Factor {
    std::uint64_t p;
    int k;
};

std::vector<Factor> factor_by_table(std::uint64_t n, const PrimeTable& primes)
{
    std::vector<Factor> out;
    for (std::uint64_t p : primes.primes()) {
        if (p * p > n) break;
        if (n % p != 0) continue;
        int k = 0;
        while (n % p == 0) {
            n /= p;
            ++k;
        }
        out.push_back({p, k});
    }
    if (n > 1) {
        require(primes.n_max() >= 2 && static_cast<double>(primes.n_max()) *
                                               static_cast<double>(primes.n_max()) >=
                                           static_cast<double>(n),
                Errc::range, "classify: prime table does not cover sqrt(n)");
        out.push_back({n, 1});
    }
    return out;
}

bool in_blocks(const DecompositionParams& params, std::uint64_t p)
{
    const double x = static_cast<double>(p);
    return x >= params.d0() && x < params.d1();
}

}  // namespace

Classification classify(std::uint64_t n, const DecompositionParams& params, const PrimeTable& primes)
{
    require(n >= 1 && n < params.n, Errc::range, "classify: n must lie in [1, N)");
    if (n == 1) return {};
    const auto factors = factor_by_table(n, primes);
    const double d0 = params.d0();
    const double d1 = params.d1();
    bool in_s = false;
    for (const auto& f : factors) {
        const double x = static_cast<double>(f.p);
        if (x > d0 && x < d1) in_s = true;
    }
    if (!in_s) return {};

    // Factors are ascending, so the first block prime is in the minimal block.
    Classification c;
    int count = 0;
    bool square = false;
    for (const auto& f : factors) {
        if (!in_blocks(params, f.p)) continue;
        const int j = block_index(params.alpha, static_cast<double>(f.p));
        if (c.j < 0) {
            c.j = j;
            c.prime = f.p;
        }
        if (j != c.j) break;
        ++count;
        square = square || f.k > 1;
    }
    c.kind = (count == 1 && !square) ? Membership::in_sj : Membership::in_s_multiple;
    if (c.kind != Membership::in_sj) c.prime = 0;
    return c;
}

bool q_membership(std::uint64_t m, int j, const DecompositionParams& params, const PrimeTable& primes)
{
    require(m >= 1, Errc::range, "q_membership: m must be >= 1");
    require(j >= params.j0 && j < params.j1, Errc::range, "q_membership: j outside [j0, j1)");
    if (!(static_cast<double>(m) < params.q_bound(j))) return false;
    const double hi = block_edge(params.alpha, j + 1);
    const double lo = params.d0();
    for (const auto& f : factor_by_table(m, primes)) {
        const double x = static_cast<double>(f.p);
        if (x >= lo && x < hi) return false;
    }
    return true;
}

Classification Decomposition::at(std::uint64_t n) const
{
    require(n >= 1 && n < params_.n, Errc::range, "Decomposition::at: n must lie in [1, N)");
    const Tag& t = tags_[n];
    if (!(t.flags & kInS)) return {};
    Classification c;
    c.j = t.block;
    if (t.flags & kMultiple) {
        c.kind = Membership::in_s_multiple;
    } else {
        c.kind = Membership::in_sj;
        c.prime = t.prime;
    }
    return c;
}

bool Decomposition::in_product_set(std::uint64_t n, int* j) const
{
    if (n < 1 || n >= params_.n) return false;
    const Tag& t = tags_[n];
    if (t.prime == 0 || (t.flags & kMultiple)) return false;
    const std::uint64_t cofactor = n / t.prime;
    if (!(static_cast<double>(cofactor) < params_.q_bound(t.block))) return false;
    if (j) *j = t.block;
    return true;
}

std::vector<std::uint64_t> Decomposition::q_set(int j) const
{
    require(j >= params_.j0 && j < params_.j1, Errc::range, "q_set: j outside [j0, j1)");
    std::vector<std::uint64_t> out;
    const double bound = params_.q_bound(j);
    for (std::uint64_t m = 1; static_cast<double>(m) < bound; ++m) {
        const Tag& t = tags_[m];
        if (t.prime == 0 || t.block > j) out.push_back(m);
    }
    return out;
}

std::uint64_t Decomposition::s_total() const
{
    std::uint64_t s = 0;
    for (const auto& b : blocks_) s += b.s_count;
    return s;
}

std::uint64_t Decomposition::multiple_total() const
{
    std::uint64_t s = 0;
    for (const auto& b : blocks_) s += b.multiple_count;
    return s;
}

std::uint64_t Decomposition::s_minus_pq_total() const
{
    std::uint64_t s = 0;
    for (const auto& b : blocks_) s += b.s_minus_pq_count;
    return s;
}

std::uint64_t Decomposition::pq_total() const
{
    std::uint64_t s = 0;
    for (const auto& b : blocks_) s += b.pq_count;
    return s;
}

std::uint64_t Decomposition::inclusion_violations() const
{
    std::uint64_t s = 0;
    for (const auto& b : blocks_) s += b.pq_count - b.pq_in_s_count;
    return s;
}

Decomposition build_decomposition(const DecompositionParams& params, const PrimeTable& primes)
{
    require(params.j0 < params.j1 && params.d1() < static_cast<double>(params.n), Errc::validation,
            "build_decomposition: invalid parameters");
    require(static_cast<double>(primes.n_max()) >= params.d1(), Errc::range,
            "build_decomposition: prime table must cover D1");
    require(params.n <= (std::uint64_t{2} << 30) / sizeof(Decomposition::Tag), Errc::capacity,
            "build_decomposition: N exceeds the memory budget");

    Decomposition d;
    d.params_ = params;
    const std::uint64_t n_end = params.n;
    d.tags_.assign(n_end, {});
    const double d0 = params.d0();

    for (int j = params.j0; j < params.j1; ++j) {
        BlockStats s;
        s.block = prime_blocks(params.alpha, j, j, primes).front();
        s.q_bound = params.q_bound(j);
        for (std::uint64_t p : s.block.primes) {
            const bool opens_s = static_cast<double>(p) > d0;
            for (std::uint64_t m = p; m < n_end; m += p) {
                auto& t = d.tags_[m];
                if (t.prime == 0) {
                    t.prime = static_cast<std::uint32_t>(p);
                    t.block = static_cast<std::int16_t>(j);
                    if ((m / p) % p == 0) t.flags |= Decomposition::kMultiple;
                } else if (t.block == j) {
                    t.flags |= Decomposition::kMultiple;
                }
                if (opens_s) t.flags |= Decomposition::kInS;
            }
        }
        d.blocks_.push_back(std::move(s));
    }

    // Per-chunk counters, summed in chunk order afterwards.
    const std::size_t nb = d.blocks_.size();
    const unsigned workers = default_threads();
    const std::size_t chunk_count = std::max<std::size_t>(1, std::min<std::size_t>(workers, n_end));
    struct Counters {
        std::uint64_t not_in_s = 0;
        std::vector<std::uint64_t> s, multiple, pq_in_s, violations;
    };
    std::vector<Counters> partial(chunk_count);
    for (auto& c : partial) {
        c.s.assign(nb, 0);
        c.multiple.assign(nb, 0);
        c.pq_in_s.assign(nb, 0);
        c.violations.assign(nb, 0);
    }
    const std::size_t span = n_end - 1;
    const std::size_t step = (span + chunk_count - 1) / chunk_count;
    parallel_for(chunk_count, [&](std::size_t c_lo, std::size_t c_hi) {
        for (std::size_t c = c_lo; c < c_hi; ++c) {
            auto& acc = partial[c];
            const std::uint64_t lo = 1 + c * step;
            const std::uint64_t hi = std::min<std::uint64_t>(n_end, lo + step);
            for (std::uint64_t n = lo; n < hi; ++n) {
                const auto& t = d.tags_[n];
                if (!(t.flags & Decomposition::kInS)) {
                    ++acc.not_in_s;
                    continue;
                }
                const auto b = static_cast<std::size_t>(t.block - params.j0);
                if (t.flags & Decomposition::kMultiple) {
                    ++acc.multiple[b];
                    continue;
                }
                ++acc.s[b];
                const double cof = static_cast<double>(n / t.prime);
                const double qb = d.blocks_[b].q_bound;
                if (cof < qb) {
                    ++acc.pq_in_s[b];
                } else if (!(cof < qb * (1.0 + params.alpha))) {
                    ++acc.violations[b];
                }
            }
        }
    }, workers);

    for (const auto& c : partial) {
        d.not_in_s_ += c.not_in_s;
        for (std::size_t b = 0; b < nb; ++b) {
            d.blocks_[b].s_count += c.s[b];
            d.blocks_[b].multiple_count += c.multiple[b];
            d.blocks_[b].pq_in_s_count += c.pq_in_s[b];
            d.blocks_[b].complement_violations += c.violations[b];
        }
    }
    for (std::size_t b = 0; b < nb; ++b) {
        auto& s = d.blocks_[b];
        const int j = params.j0 + static_cast<int>(b);
        for (std::uint64_t m = 1; static_cast<double>(m) < s.q_bound; ++m) {
            const auto& t = d.tags_[m];
            if (t.prime == 0 || t.block > j) ++s.q_count;
        }
        s.pq_count = static_cast<std::uint64_t>(s.block.primes.size()) * s.q_count;
        s.s_minus_pq_count = s.s_count - s.pq_in_s_count;
    }
    return d;
}

CoverageReport coverage_report(const Decomposition& d, const PrimeTable& primes)
{
    const auto& p = d.params();
    CoverageReport r;
    r.n = p.n;
    r.alpha = p.alpha;
    r.j0 = p.j0;
    r.j1 = p.j1;
    r.d0 = p.d0();
    r.d1 = p.d1();
    const double n = static_cast<double>(p.n);

    double pj_sq = 0.0;
    for (const auto& b : d.blocks()) {
        const double ratio = static_cast<double>(b.block.primes.size()) / b.block.lo;
        pj_sq += ratio * ratio;
    }

    r.lines.push_back({"complement of S |[1,N) \\ S|", d.not_in_s(), p.alpha * n, false});
    r.lines.push_back({"multiples |S \\ U S_j| vs N sum_j (|P_j|/(1+a)^j)^2", d.multiple_total(),
                       n * pj_sq, false});
    r.lines.push_back({"multiples (asymptotic) |S \\ U S_j|", d.multiple_total(), p.alpha * n, false});
    r.lines.push_back({"block remainders sum_j |S_j \\ P_jQ_j|", d.s_minus_pq_total(), 2.0 * p.alpha * n, false});
    r.lines.push_back({"leftover |[1,N) \\ U P_jQ_j|", d.leftover(), 3.0 * p.alpha * n, false});
    for (auto& line : r.lines) line.holds = static_cast<double>(line.measured) <= line.reference;

    // Primes l with D0 < l < D1.
    const auto lo = static_cast<std::uint64_t>(std::floor(r.d0)) + 1;
    const auto hi = static_cast<std::uint64_t>(std::ceil(r.d1));
    double log_prod = 0.0;
    for (std::uint64_t l : primes.range(lo, hi)) log_prod += std::log1p(-1.0 / static_cast<double>(l));
    r.mertens_product = std::exp(log_prod);
    r.inverse_j0 = 1.0 / static_cast<double>(p.j0);
    r.complement_fraction = static_cast<double>(d.not_in_s()) / n;
    r.mertens_relative_gap = std::abs(r.complement_fraction - r.mertens_product) / r.mertens_product;
    r.inclusion_violations = d.inclusion_violations();
    const double d0_round = std::round(r.d0);
    r.boundary_prime_at_d0 = d0_round == r.d0 && d0_round >= 2.0 &&
                             primes.is_prime(static_cast<std::uint64_t>(d0_round));
    return r;
}

}  // namespace mobhoro
