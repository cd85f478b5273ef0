#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace mobhoro {

enum class Transcendental { none, e, pi };

// Exact real of the form r + s*sqrt(d) + t*K with rationals r, s, t, a squarefree
// d > 1 and K one of {e, pi}. {1, sqrt(d), K} is linearly independent over Q,
// so equality and rationality are decided exactly. Expressions that would need
// two different radicands, or both e and pi, are rejected with Errc::unsupported.
class SymbolicReal {
public:
    SymbolicReal() = default;
    explicit SymbolicReal(mpq_class r) : rational_(std::move(r)) { rational_.canonicalize(); }
    static SymbolicReal integer(long v) { return SymbolicReal(mpq_class(v)); }
    static SymbolicReal sqrt_of(std::uint64_t n);  // sqrt(n) normalised; n >= 0
    static SymbolicReal constant(Transcendental k);
    static SymbolicReal golden_ratio();            // 1/2 + sqrt(5)/2

    // Grammar: sums/differences of terms; a term is a product/quotient in which
    // at most one factor is irrational and divisors are rational. Atoms: integers,
    // decimals, a/b, e | exp1, pi, phi | golden, sqrtN | sqrt(N), parentheses.
    static SymbolicReal parse(std::string_view text);

    const mpq_class& rational_part() const noexcept { return rational_; }
    const mpq_class& surd_coefficient() const noexcept { return surd_; }
    std::uint64_t radicand() const noexcept { return radicand_; }
    const mpq_class& transcendental_coefficient() const noexcept { return trans_coeff_; }
    Transcendental transcendental() const noexcept { return trans_; }

    bool is_zero() const { return rational_ == 0 && surd_ == 0 && trans_coeff_ == 0; }
    bool is_rational() const { return surd_ == 0 && trans_coeff_ == 0; }

    SymbolicReal operator+(const SymbolicReal& o) const;
    SymbolicReal operator-(const SymbolicReal& o) const;
    SymbolicReal operator-() const;
    SymbolicReal scaled(const mpq_class& q) const;
    // Product where at least one side is rational.
    SymbolicReal operator*(const SymbolicReal& o) const;
    bool operator==(const SymbolicReal& o) const;

    // Correctly rounded up to the final addition (error below 2^-prec relative
    // to the largest term).
    void evaluate(mpfr_t out, mpfr_prec_t prec) const;
    double approx() const;
    std::string to_string() const;

    // True when this == q * other for a rational q (other nonzero); sets q.
    bool rational_multiple_of(const SymbolicReal& other, mpq_class* q = nullptr) const;

private:
    void normalise();

    mpq_class rational_{0};
    mpq_class surd_{0};
    std::uint64_t radicand_ = 0;
    mpq_class trans_coeff_{0};
    Transcendental trans_ = Transcendental::none;
};

// Fixed-size double-double split of a real: value = hi + lo with |lo| <= ulp(hi)/2.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;
};

DoubleDouble to_double_double(const SymbolicReal& x);

// frac(n * x) in [0, 1) with absolute error around 1e-16 for |n| < 2^40.
double fractional_product(const DoubleDouble& x, std::int64_t n);

}  // namespace mobhoro
