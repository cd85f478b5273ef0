#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "mobhoro/modular.hpp"

namespace mobhoro {

// Upper-triangular (alpha, beta; 0, delta) with alpha * delta = 1.
struct ParabolicElement {
    double alpha = 1.0, beta = 0.0, delta = 1.0;
    double lower = 0.0;  // must be exactly 0

    // Validation error unless lower == 0 and |alpha delta - 1| <= 1e-12.
    static ParabolicElement make(double alpha, double beta, double delta, double lower = 0.0);
    ParabolicElement operator*(const ParabolicElement& o) const;
};

// alpha / delta = alpha^2.
double chi(const ParabolicElement& b);

struct ConjugationCheck {
    std::array<double, 4> product{};  // beta u beta^-1
    double chi = 0.0;
    double max_error = 0.0;           // entrywise distance to (1, chi; 0, 1)
    bool pass = false;
};

ConjugationCheck conjugation_exponent_check(const ParabolicElement& b, double tolerance = 1e-12);

// Exact element x + y sqrt(d) of Q(sqrt d); d need not be squarefree.
struct QuadraticNumber {
    mpq_class x{0}, y{0};
    mpz_class d{0};

    bool is_rational() const { return y == 0; }
    QuadraticNumber operator*(const QuadraticNumber& o) const;
    QuadraticNumber operator/(const QuadraticNumber& o) const;
    double approx() const;
    std::string to_string() const;
};

struct PointDescriptor {
    enum class Kind { infinity, rational, quadratic_surd, non_quadratic_irrational };
    Kind kind = Kind::infinity;
    mpq_class rational{0};
    std::array<mpz_class, 3> abc{};  // z = (-b + sqrt(b^2 - 4ac)) / (2a)
    std::string symbol;

    static PointDescriptor infinity();
    static PointDescriptor from_rational(mpq_class q);
    // Validation error unless gcd(a,b,c) = 1, a != 0 and b^2 - 4ac > 0 is not a square.
    static PointDescriptor quadratic_surd(mpz_class a, mpz_class b, mpz_class c);
    static PointDescriptor non_quadratic(std::string symbol);
    static PointDescriptor from_cusp(const CuspDirection& c);
    // inf | p/q | sqrt:N | surd:a,b,c | any symbolic real (e, pi, phi, 1+sqrt2, ...)
    static PointDescriptor parse(std::string_view text);

    mpz_class discriminant() const;  // quadratic_surd only
    std::string describe() const;
};

struct SurdElement {
    QuadraticNumber value;               // (t + u sqrt d) / (t - u sqrt d)
    std::array<mpq_class, 4> matrix;     // ((t - b u)/2, -c u; a u, (t + b u)/2)
    mpq_class norm;                      // det = (t^2 - d u^2) / 4
    bool stabilizes = false;             // gamma z = z, checked exactly in Q(sqrt d)
    double chi_conjugated = 0.0;         // chi of xi^-1 (gamma / sqrt det) xi
    bool chi_matches = false;            // |chi_conjugated - value| <= 1e-10 relative
    bool rational = false;               // exact
};

// Precondition: t^2 - d u^2 > 0 (validation error otherwise).
SurdElement surd_group_element(const mpz_class& a, const mpz_class& b, const mpz_class& c, const mpq_class& t,
                               const mpq_class& u);

struct CorrelatorClass {
    enum class Kind { full_rational_group, trivial_group };
    Kind kind = Kind::full_rational_group;
    PointDescriptor point;
    std::optional<SurdElement> witness;  // quadratic surds: u = 1, t = floor(sqrt d) + 1

    std::string group() const { return kind == Kind::full_rational_group ? "Q*" : "{1}"; }
};

CorrelatorClass classify_correlator(const PointDescriptor& z);

}  // namespace mobhoro
