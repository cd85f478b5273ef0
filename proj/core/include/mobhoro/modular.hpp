#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "mobhoro/symbolic.hpp"

namespace mobhoro {

// Integer matrix (a, b; c, d) stored row-major.
using IntMatrix = std::array<std::int64_t, 4>;

IntMatrix int_multiply(const IntMatrix& l, const IntMatrix& r);  // range error on overflow
constexpr IntMatrix kIdentity{1, 0, 0, 1};

// Exact descriptor of xi(infinity) = a/c.
struct CuspDirection {
    enum class Kind { infinity, rational, quadratic, irrational };
    Kind kind = Kind::infinity;
    mpq_class rational;               // for rational
    std::array<mpz_class, 3> abc;     // for quadratic: root (-b + sqrt(b^2 - 4ac)) / (2a)
    std::string symbol;               // printable value

    std::string describe() const;
};

// xi in SL2(R) with exact entries; det is checked numerically at 256 bits.
class ModularPoint {
public:
    static ModularPoint from_entries(SymbolicReal a, SymbolicReal b, SymbolicReal c, SymbolicReal d,
                                     std::string label = {});
    // point:identity | point:lower:t=<v> (1,0;t,1) | point:cusp:z=<v> (z,-1;1,0)
    // | point:matrix:a=..,b=..,c=..,d=..   (the "point:" prefix is optional)
    static ModularPoint parse(std::string_view spec);

    const SymbolicReal& a() const noexcept { return e_[0]; }
    const SymbolicReal& b() const noexcept { return e_[1]; }
    const SymbolicReal& c() const noexcept { return e_[2]; }
    const SymbolicReal& d() const noexcept { return e_[3]; }
    const std::string& label() const noexcept { return label_; }

    // True when all entries are integers (then the horocycle orbit is constant).
    bool is_integral() const;
    CuspDirection cusp_direction() const;
    // xi * u^m with u = (1, 1; 0, 1).
    ModularPoint times_u(std::int64_t m) const;

private:
    std::array<SymbolicReal, 4> e_;
    std::string label_;
};

struct FundamentalDomainCoords {
    double x = 0.0;      // [-1/2, 1/2)
    double y = 0.0;      // x^2 + y^2 >= 1
    double theta = 0.0;  // [0, 2 pi)
    IntMatrix gamma = kIdentity;
    int moves = 0;       // translations plus inversions used
};

// Translate-and-invert reduction of z = x + i y in double precision. Precision
// error if y is not positive and finite.
FundamentalDomainCoords reduce(double x, double y);

// Working precision in bits for the orbit point xi u^n (see horocycle_point).
int default_precision_bits(const ModularPoint& xi, std::uint64_t n);

// Batch evaluator of xi u^n. Entries are evaluated once at the precision needed
// for n <= n_max; evaluate() may be called concurrently.
class OrbitEvaluator {
public:
    OrbitEvaluator(const ModularPoint& xi, std::uint64_t n_max, std::optional<int> precision_bits = {});
    ~OrbitEvaluator();
    OrbitEvaluator(const OrbitEvaluator&) = delete;
    OrbitEvaluator& operator=(const OrbitEvaluator&) = delete;

    int precision_bits() const noexcept { return bits_; }
    std::uint64_t n_max() const noexcept { return n_max_; }
    FundamentalDomainCoords operator()(std::uint64_t n) const;
    // Points for every n in ns, in parallel.
    std::vector<FundamentalDomainCoords> batch(const std::vector<std::uint64_t>& ns) const;

private:
    struct Impl;
    Impl* impl_;
    int bits_;
    std::uint64_t n_max_;
};

// Reduced coordinates of xi u^n. Precision error if precision_bits is below what
// the reduction of this point needs.
FundamentalDomainCoords horocycle_point(const ModularPoint& xi, std::uint64_t n,
                                        std::optional<int> precision_bits = {});

struct Genericity {
    bool generic = false;
    CuspDirection cusp;
};

// Generic iff xi(infinity) is irrational; decided symbolically.
Genericity genericity(const ModularPoint& xi);

}  // namespace mobhoro
