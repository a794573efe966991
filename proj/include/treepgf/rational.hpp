#pragma once

/**
 * @file rational.hpp
 * @brief Exact rational scalars backed by GMP.
 *
 * Every exact quantity in the library (PGF coefficients, factorial moments,
 * tiered binomials, cumulant constants) is a Rational. Values are kept in
 * lowest terms with a positive denominator, so equality is canonical-form
 * equality and the string form "p/q" (or "p" when q == 1) is unique.
 */

#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace treepgf {

using BigInt = mpz_class;

class Rational {
public:
    Rational() = default;

    template <std::integral I>
    Rational(I n) : v_(to_mpz(n)) {}  // NOLINT(google-explicit-constructor)

    template <std::integral I, std::integral J>
    Rational(I num, J den) : Rational(to_mpz(num), to_mpz(den)) {}

    Rational(const BigInt& n) : v_(n) {}  // NOLINT(google-explicit-constructor)

    Rational(const BigInt& num, const BigInt& den) {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }

    static Rational from_mpq(mpq_class q) {
        Rational r;
        r.v_ = std::move(q);
        r.v_.canonicalize();
        return r;
    }

    /// Parses "p", "-p" or "p/q" (surrounding whitespace not allowed).
    static Rational parse(std::string_view s) {
        if (s.empty()) throw std::invalid_argument("Rational: empty string");
        auto slash = s.find('/');
        auto check = [&](std::string_view part, bool allow_sign) {
            std::size_t i = 0;
            if (allow_sign && !part.empty() && (part[0] == '-' || part[0] == '+')) i = 1;
            if (i == part.size()) throw std::invalid_argument("Rational: malformed '" + std::string(s) + "'");
            for (; i < part.size(); ++i)
                if (part[i] < '0' || part[i] > '9')
                    throw std::invalid_argument("Rational: malformed '" + std::string(s) + "'");
        };
        if (slash == std::string_view::npos) {
            check(s, true);
            return Rational(BigInt(std::string(s[0] == '+' ? s.substr(1) : s)));
        }
        auto num = s.substr(0, slash);
        auto den = s.substr(slash + 1);
        check(num, true);
        check(den, false);
        return Rational(BigInt(std::string(num[0] == '+' ? num.substr(1) : num)), BigInt(std::string(den)));
    }

    const mpq_class& value() const { return v_; }
    BigInt numerator() const { return v_.get_num(); }
    BigInt denominator() const { return v_.get_den(); }

    int sign() const { return sgn(v_); }
    bool is_zero() const { return sign() == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    double to_double() const { return v_.get_d(); }

    /// Canonical string: "p/q", or "p" when the denominator is 1.
    std::string str() const {
        if (is_integer()) return v_.get_num().get_str();
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

    Rational operator-() const { return from_mpq(mpq_class(-v_)); }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    template <std::integral I>
    static BigInt to_mpz(I n) {
        if constexpr (std::is_signed_v<I>) {
            return BigInt(static_cast<long>(n));
        } else {
            return BigInt(static_cast<unsigned long>(n));
        }
    }

    mpq_class v_{0};
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

inline Rational pow(const Rational& base, unsigned e) {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.value().get_num_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), base.value().get_den_mpz_t(), e);
    return Rational(num, den);
}

/// 2^e for any integer e, exactly.
inline Rational pow2(long e) {
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
    return e < 0 ? Rational(BigInt(1), p) : Rational(p);
}

inline BigInt binomial(unsigned long n, unsigned long k) {
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

inline BigInt factorial(unsigned long n) {
    BigInt r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

/// n (n-1) ... (n-k+1)
inline BigInt falling_factorial(unsigned long n, unsigned long k) {
    if (k > n) return 0;
    BigInt r = 1;
    for (unsigned long i = 0; i < k; ++i) r *= n - i;
    return r;
}

/// True iff d divides n; d must be positive.
inline bool divides(const BigInt& d, const BigInt& n) { return mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t()) != 0; }

}  // namespace treepgf
