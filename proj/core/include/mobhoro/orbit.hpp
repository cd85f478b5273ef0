#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mobhoro/arith.hpp"
#include "mobhoro/modular.hpp"
#include "mobhoro/observable.hpp"

namespace mobhoro {

struct OrbitOptions {
    std::optional<int> precision_bits;  // default: default_precision_bits at the largest n
    QuadratureSpec quadrature;          // used when a Haar mean is needed
};

struct OrbitSample {
    std::uint64_t n = 0;
    FundamentalDomainCoords point;
    double f = 0.0;
};

// Samples of T^n xi for n in [first, last].
std::vector<OrbitSample> orbit_series(const ModularPoint& xi, const Observable& f, std::uint64_t first,
                                      std::uint64_t last, const OrbitOptions& opt = {});

// (1/N) sum_{n=1}^N f(T^n xi). Sums of orbit values are accumulated exactly and
// rounded once, so the result does not depend on thread count or order.
double birkhoff_average(const Observable& f, const ModularPoint& xi, std::uint64_t n, const OrbitOptions& opt = {});

struct CorrelationEstimate {
    std::uint64_t p = 0, q = 0, n = 0;
    double value = 0.0;       // (1/N) sum f(xi u^{pn}) f(xi u^{qn})
    double mean = 0.0;        // Haar mean of f
    double target = 0.0;      // mean^2
    double gap = 0.0;         // |value - target|
    int precision_bits = 0;
};

CorrelationEstimate pair_correlation(const Observable& f, const ModularPoint& xi, std::uint64_t p, std::uint64_t q,
                                     std::uint64_t n, const OrbitOptions& opt = {});

struct DisjointnessRung {
    std::uint64_t n = 0;
    double total = 0.0;      // (1/N) sum nu(n) f(T^n xi)
    double centered = 0.0;   // (1/N) sum nu(n) (f - c)(T^n xi)
    double constant = 0.0;   // c (1/N) sum nu(n)
    double mertens_ratio = 0.0;  // (1/N) sum nu(n)
};

struct DisjointnessReport {
    double mean = 0.0;  // c = Haar mean of f
    int precision_bits = 0;
    std::vector<DisjointnessRung> ladder;
};

// The ladder rungs must be increasing and at most nu.n_max(); only real tables
// (signed) are supported.
DisjointnessReport mobius_disjointness_sum(const ModularPoint& xi, const Observable& f,
                                           const std::vector<std::uint64_t>& ladder, const MultiplicativeTable& nu,
                                           const OrbitOptions& opt = {});

}  // namespace mobhoro
