#include "mobhoro/orbit.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "mobhoro/error.hpp"
#include "mobhoro/parallel.hpp"

namespace mobhoro {

namespace {

// Exact accumulator for doubles: 2200 bits cover the whole double exponent range
// plus 2^64 terms, so every addition is exact and only the final read rounds.
class ExactSum {
public:
    ExactSum()
    {
        mpfr_init2(v_, 2200);
        mpfr_set_zero(v_, 1);
    }
    ~ExactSum() { mpfr_clear(v_); }
    ExactSum(const ExactSum&) = delete;
    ExactSum& operator=(const ExactSum&) = delete;
    void add(double x) { mpfr_add_d(v_, v_, x, MPFR_RNDN); }
    void add(const ExactSum& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); }
    // Correctly rounded sum / n.
    double mean(std::uint64_t n) const
    {
        mpfr_t q;
        mpfr_init2(q, 2200);
        mpfr_div_ui(q, v_, n, MPFR_RNDN);
        const double out = mpfr_get_d(q, MPFR_RNDN);
        mpfr_clear(q);
        return out;
    }

private:
    mpfr_t v_;
};

std::size_t chunk_count(std::uint64_t n) { return std::max<std::uint64_t>(1, std::min<std::uint64_t>(n, 256)); }

// Exact means over i in [1, n] of each of the `outputs` values term(i) writes.
template <class Term>
void exact_sums(std::uint64_t n, std::size_t outputs, std::vector<double>& means, const Term& term)
{
    const std::size_t chunks = chunk_count(n);
    std::vector<std::unique_ptr<ExactSum[]>> partial(chunks);
    for (auto& p : partial) p = std::make_unique<ExactSum[]>(outputs);
    parallel_for(chunks, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> buf(outputs);
        for (std::size_t c = lo; c < hi; ++c) {
            const std::uint64_t first = 1 + n * c / chunks, last = n * (c + 1) / chunks;
            for (std::uint64_t i = first; i <= last; ++i) {
                term(i, buf.data());
                for (std::size_t k = 0; k < outputs; ++k) partial[c][k].add(buf[k]);
            }
        }
    });
    means.assign(outputs, 0.0);
    for (std::size_t k = 0; k < outputs; ++k) {
        ExactSum total;
        for (auto& p : partial) total.add(p[k]);
        means[k] = total.mean(n);
    }
}

double mean_of(const Observable& f, const OrbitOptions& opt)
{
    return f.exact_mean() ? *f.exact_mean() : haar_mean(f, opt.quadrature).mean;
}

double eval(const Observable& f, const FundamentalDomainCoords& c) { return f(c.x, c.y, c.theta); }

}  // namespace

std::vector<OrbitSample> orbit_series(const ModularPoint& xi, const Observable& f, std::uint64_t first,
                                      std::uint64_t last, const OrbitOptions& opt)
{
    require(first <= last, Errc::validation, "orbit: first index after last");
    const OrbitEvaluator ev(xi, last, opt.precision_bits);
    std::vector<OrbitSample> out(last - first + 1);
    parallel_for(out.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            out[i].n = first + i;
            out[i].point = ev(first + i);
            out[i].f = eval(f, out[i].point);
        }
    });
    return out;
}

double birkhoff_average(const Observable& f, const ModularPoint& xi, std::uint64_t n, const OrbitOptions& opt)
{
    require(n >= 1, Errc::validation, "birkhoff_average: N must be >= 1");
    const OrbitEvaluator ev(xi, n, opt.precision_bits);
    std::vector<double> means;
    exact_sums(n, 1, means, [&](std::uint64_t i, double* out) { out[0] = eval(f, ev(i)); });
    return means[0];
}

CorrelationEstimate pair_correlation(const Observable& f, const ModularPoint& xi, std::uint64_t p, std::uint64_t q,
                                     std::uint64_t n, const OrbitOptions& opt)
{
    require(p >= 1 && q >= 1 && p != q, Errc::validation, "pair_correlation: need distinct p, q >= 1");
    require(n >= 1, Errc::validation, "pair_correlation: N must be >= 1");
    CorrelationEstimate c;
    c.p = p;
    c.q = q;
    c.n = n;
    c.mean = mean_of(f, opt);
    c.target = c.mean * c.mean;
    const OrbitEvaluator ev(xi, std::max(p, q) * n, opt.precision_bits);
    c.precision_bits = ev.precision_bits();
    std::vector<double> means;
    exact_sums(n, 1, means, [&](std::uint64_t i, double* out) { out[0] = eval(f, ev(p * i)) * eval(f, ev(q * i)); });
    c.value = means[0];
    c.gap = std::abs(c.value - c.target);
    return c;
}

DisjointnessReport mobius_disjointness_sum(const ModularPoint& xi, const Observable& f,
                                           const std::vector<std::uint64_t>& ladder, const MultiplicativeTable& nu,
                                           const OrbitOptions& opt)
{
    require(!ladder.empty() && ladder.front() >= 1 && std::is_sorted(ladder.begin(), ladder.end()) &&
                std::adjacent_find(ladder.begin(), ladder.end()) == ladder.end(),
            Errc::validation, "disjointness: ladder must be strictly increasing and start at >= 1");
    require(nu.is_signed(), Errc::unsupported, "disjointness: only real-valued nu tables are supported");
    const std::uint64_t n_max = ladder.back();
    require(nu.n_max() >= n_max, Errc::horizon, "disjointness: nu not defined up to the largest rung");

    DisjointnessReport r;
    r.mean = mean_of(f, opt);
    const OrbitEvaluator ev(xi, n_max, opt.precision_bits);
    r.precision_bits = ev.precision_bits();
    std::vector<double> values(n_max + 1, 0.0);
    parallel_for(n_max, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) values[i + 1] = eval(f, ev(i + 1));
    });
    const double c = r.mean;
    for (std::uint64_t rung : ladder) {
        std::vector<double> means;
        exact_sums(rung, 3, means, [&](std::uint64_t i, double* out) {
            const double s = nu.sign(i);
            out[0] = s * values[i];
            out[1] = s * (values[i] - c);
            out[2] = s;
        });
        DisjointnessRung row;
        row.n = rung;
        row.total = means[0];
        row.centered = means[1];
        row.mertens_ratio = means[2];
        row.constant = c * means[2];
        r.ladder.push_back(row);
    }
    return r;
}

}  // namespace mobhoro
