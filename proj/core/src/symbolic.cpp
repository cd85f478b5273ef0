#include "mobhoro/symbolic.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "mobhoro/error.hpp"

namespace mobhoro {

namespace {

// Largest k with k^2 | n; returns (k, n / k^2).
std::pair<std::uint64_t, std::uint64_t> split_square(std::uint64_t n)
{
    std::uint64_t outside = 1;
    std::uint64_t inside = 1;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        int k = 0;
        while (n % p == 0) {
            n /= p;
            ++k;
        }
        for (int i = 0; i < k / 2; ++i) outside *= p;
        if (k % 2) inside *= p;
    }
    inside *= n;
    return {outside, inside};
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    SymbolicReal parse_all()
    {
        SymbolicReal v = expr();
        skip();
        if (pos_ != s_.size()) error("unexpected trailing input");
        return v;
    }

private:
    [[noreturn]] void error(const std::string& what) const
    {
        fail(Errc::validation, "symbolic real '" + std::string(s_) + "': " + what +
                                   " at offset " + std::to_string(pos_));
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    SymbolicReal expr()
    {
        SymbolicReal v = term();
        for (;;) {
            if (eat('+'))
                v = v + term();
            else if (eat('-'))
                v = v - term();
            else
                return v;
        }
    }

    SymbolicReal term()
    {
        SymbolicReal v = unary();
        for (;;) {
            if (eat('*')) {
                v = v * unary();
            } else if (eat('/')) {
                SymbolicReal d = unary();
                if (!d.is_rational()) error("division by an irrational value");
                if (d.rational_part() == 0) error("division by zero");
                v = v.scaled(1 / d.rational_part());
            } else {
                return v;
            }
        }
    }

    SymbolicReal unary()
    {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return atom();
    }

    SymbolicReal atom()
    {
        skip();
        if (eat('(')) {
            SymbolicReal v = expr();
            if (!eat(')')) error("missing ')'");
            return v;
        }
        if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
            return number();
        std::string word;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) word += s_[pos_++];
        if (word.empty()) error("expected a number or symbol");
        if (word == "e") return SymbolicReal::constant(Transcendental::e);
        if (word == "pi") return SymbolicReal::constant(Transcendental::pi);
        if (word == "phi" || word == "golden") return SymbolicReal::golden_ratio();
        if (word == "exp") {
            // exp1 only: e^k for other k leaves the vocabulary.
            if (pos_ < s_.size() && s_[pos_] == '1' &&
                (pos_ + 1 == s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
                ++pos_;
                return SymbolicReal::constant(Transcendental::e);
            }
            fail(Errc::unsupported, "symbolic real: only exp1 is in the vocabulary");
        }
        if (word == "sqrt") {
            const bool paren = eat('(');
            skip();
            std::string digits;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) digits += s_[pos_++];
            if (digits.empty()) error("sqrt needs a non-negative integer argument");
            if (paren && !eat(')')) error("missing ')' after sqrt argument");
            return SymbolicReal::sqrt_of(std::stoull(digits));
        }
        fail(Errc::unsupported, "symbolic real: unknown symbol '" + word + "'");
    }

    SymbolicReal number()
    {
        std::string int_part, frac_part;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) int_part += s_[pos_++];
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) frac_part += s_[pos_++];
        }
        if (int_part.empty() && frac_part.empty()) error("malformed number");
        const mpz_class num(int_part + frac_part, 10);
        mpz_class den = 1;
        for (std::size_t i = 0; i < frac_part.size(); ++i) den *= 10;
        mpq_class q(num, den);
        q.canonicalize();
        return SymbolicReal(q);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

std::string rational_text(const mpq_class& q) { return q.get_str(); }

}  // namespace

SymbolicReal SymbolicReal::sqrt_of(std::uint64_t n)
{
    if (n == 0) return SymbolicReal();
    const auto [outside, inside] = split_square(n);
    SymbolicReal v;
    if (inside == 1) {
        v.rational_ = mpq_class(mpz_class(static_cast<unsigned long>(outside)));
        return v;
    }
    v.surd_ = mpq_class(mpz_class(static_cast<unsigned long>(outside)));
    v.radicand_ = inside;
    return v;
}

SymbolicReal SymbolicReal::constant(Transcendental k)
{
    SymbolicReal v;
    if (k == Transcendental::none) return v;
    v.trans_ = k;
    v.trans_coeff_ = 1;
    return v;
}

SymbolicReal SymbolicReal::golden_ratio()
{
    SymbolicReal v = sqrt_of(5).scaled(mpq_class(1, 2));
    v.rational_ = mpq_class(1, 2);
    return v;
}

SymbolicReal SymbolicReal::parse(std::string_view text) { return Parser(text).parse_all(); }

void SymbolicReal::normalise()
{
    rational_.canonicalize();
    surd_.canonicalize();
    trans_coeff_.canonicalize();
    if (surd_ == 0) radicand_ = 0;
    if (trans_coeff_ == 0) trans_ = Transcendental::none;
}

SymbolicReal SymbolicReal::operator+(const SymbolicReal& o) const
{
    SymbolicReal r = *this;
    r.rational_ += o.rational_;
    if (o.surd_ != 0) {
        if (r.surd_ != 0 && r.radicand_ != o.radicand_)
            fail(Errc::unsupported, "symbolic real: two different radicands in one value");
        r.radicand_ = o.radicand_;
        r.surd_ += o.surd_;
    }
    if (o.trans_coeff_ != 0) {
        if (r.trans_coeff_ != 0 && r.trans_ != o.trans_)
            fail(Errc::unsupported, "symbolic real: e and pi in one value");
        r.trans_ = o.trans_;
        r.trans_coeff_ += o.trans_coeff_;
    }
    r.normalise();
    return r;
}

SymbolicReal SymbolicReal::operator-(const SymbolicReal& o) const { return *this + (-o); }

SymbolicReal SymbolicReal::operator-() const { return scaled(mpq_class(-1)); }

SymbolicReal SymbolicReal::scaled(const mpq_class& q) const
{
    SymbolicReal r = *this;
    r.rational_ *= q;
    r.surd_ *= q;
    r.trans_coeff_ *= q;
    r.normalise();
    return r;
}

SymbolicReal SymbolicReal::operator*(const SymbolicReal& o) const
{
    if (is_rational()) return o.scaled(rational_);
    if (o.is_rational()) return scaled(o.rational_);
    fail(Errc::unsupported, "symbolic real: product of two irrational values leaves the vocabulary");
}

bool SymbolicReal::operator==(const SymbolicReal& o) const
{
    return rational_ == o.rational_ && surd_ == o.surd_ && radicand_ == o.radicand_ &&
           trans_coeff_ == o.trans_coeff_ && trans_ == o.trans_;
}

bool SymbolicReal::rational_multiple_of(const SymbolicReal& other, mpq_class* q) const
{
    if (other.is_zero()) return false;
    if (other.radicand_ != 0 && radicand_ != 0 && other.radicand_ != radicand_) return false;
    if (other.trans_ != Transcendental::none && trans_ != Transcendental::none && other.trans_ != trans_)
        return false;
    // Pick the first nonzero coordinate of `other` to fix the candidate ratio.
    mpq_class ratio;
    if (other.rational_ != 0)
        ratio = rational_ / other.rational_;
    else if (other.surd_ != 0)
        ratio = surd_ / other.surd_;
    else
        ratio = trans_coeff_ / other.trans_coeff_;
    if (!(other.scaled(ratio) == *this)) return false;
    if (q) *q = ratio;
    return true;
}

void SymbolicReal::evaluate(mpfr_t out, mpfr_prec_t prec) const
{
    const mpfr_prec_t work = prec + 32;
    mpfr_t acc, term;
    mpfr_init2(acc, work);
    mpfr_init2(term, work);
    mpfr_set_q(acc, rational_.get_mpq_t(), MPFR_RNDN);
    if (surd_ != 0) {
        mpfr_sqrt_ui(term, static_cast<unsigned long>(radicand_), MPFR_RNDN);
        mpfr_mul_q(term, term, surd_.get_mpq_t(), MPFR_RNDN);
        mpfr_add(acc, acc, term, MPFR_RNDN);
    }
    if (trans_coeff_ != 0) {
        if (trans_ == Transcendental::e) {
            mpfr_set_ui(term, 1, MPFR_RNDN);
            mpfr_exp(term, term, MPFR_RNDN);
        } else {
            mpfr_const_pi(term, MPFR_RNDN);
        }
        mpfr_mul_q(term, term, trans_coeff_.get_mpq_t(), MPFR_RNDN);
        mpfr_add(acc, acc, term, MPFR_RNDN);
    }
    mpfr_set_prec(out, prec);
    mpfr_set(out, acc, MPFR_RNDN);
    mpfr_clear(acc);
    mpfr_clear(term);
}

double SymbolicReal::approx() const
{
    mpfr_t v;
    mpfr_init2(v, 64);
    evaluate(v, 64);
    const double d = mpfr_get_d(v, MPFR_RNDN);
    mpfr_clear(v);
    return d;
}

std::string SymbolicReal::to_string() const
{
    std::ostringstream os;
    bool first = true;
    auto put = [&](const mpq_class& c, const std::string& sym) {
        if (c == 0) return;
        mpq_class mag = abs(c);
        if (!first) os << (c < 0 ? '-' : '+');
        else if (c < 0) os << '-';
        first = false;
        if (sym.empty()) {
            os << rational_text(mag);
        } else {
            if (mag != 1) os << rational_text(mag) << '*';
            os << sym;
        }
    };
    put(rational_, "");
    if (surd_ != 0) put(surd_, "sqrt" + std::to_string(radicand_));
    if (trans_coeff_ != 0) put(trans_coeff_, trans_ == Transcendental::e ? "e" : "pi");
    if (first) os << '0';
    return os.str();
}

DoubleDouble to_double_double(const SymbolicReal& x)
{
    mpfr_t v, r;
    mpfr_init2(v, 256);
    mpfr_init2(r, 256);
    x.evaluate(v, 256);
    DoubleDouble out;
    out.hi = mpfr_get_d(v, MPFR_RNDN);
    mpfr_sub_d(r, v, out.hi, MPFR_RNDN);
    out.lo = mpfr_get_d(r, MPFR_RNDN);
    mpfr_clear(v);
    mpfr_clear(r);
    return out;
}

double fractional_product(const DoubleDouble& x, std::int64_t n)
{
    const double dn = static_cast<double>(n);
    const double p = dn * x.hi;
    const double err = std::fma(dn, x.hi, -p);
    double f = p - std::floor(p);
    f += err;
    f += dn * x.lo;
    f -= std::floor(f);
    if (f >= 1.0) f -= 1.0;
    return f;
}

}  // namespace mobhoro
