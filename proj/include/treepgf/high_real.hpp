#pragma once

/**
 * @file high_real.hpp
 * @brief Extended-precision reals with an attached truncation-error bound.
 *
 * Working type is a 50-digit binary float; callers request at most
 * kMaxDigits decimal digits so that rounding stays far below the requested
 * tolerance.
 */

#include <treepgf/rational.hpp>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <nlohmann/json.hpp>

#include <cstddef>
#include <ios>
#include <stdexcept>
#include <string>
#include <vector>

namespace treepgf {

using Real = boost::multiprecision::cpp_bin_float_50;

inline constexpr unsigned kMaxDigits = 40;

struct HighReal {
    Real value = 0;
    Real error_bound = 0;  // |true value - value| <= error_bound (truncation only)
    unsigned digits = 0;   // requested significant decimal digits

    std::string str() const { return value.str(static_cast<std::streamsize>(digits == 0 ? 20 : digits)); }

    nlohmann::json to_json() const {
        return {{"value", str()}, {"digits", digits},
                {"error_bound", error_bound.str(3, std::ios_base::scientific)}};
    }
};

inline void check_digits(unsigned digits) {
    if (digits < 1 || digits > kMaxDigits)
        throw std::invalid_argument("precision must be in 1.." + std::to_string(kMaxDigits) + " digits");
}

/// 10^{-digits}
inline Real tolerance(unsigned digits) { return boost::multiprecision::pow(Real(10), -static_cast<int>(digits)); }

inline Real to_real(const Rational& r) {
    return Real(r.numerator().get_str()) / Real(r.denominator().get_str());
}

inline Real pi() { return boost::math::constants::pi<Real>(); }
inline Real ln2() { return boost::math::constants::ln_two<Real>(); }
inline Real euler_gamma() { return boost::math::constants::euler<Real>(); }

/// B_0..B_m (B_1 = -1/2).
inline std::vector<Rational> bernoulli_numbers(std::size_t m) {
    std::vector<Rational> b(m + 1);
    b[0] = 1;
    for (std::size_t k = 1; k <= m; ++k) {
        Rational acc;
        for (std::size_t j = 0; j < k; ++j) acc += Rational(binomial(k + 1, j)) * b[j];
        b[k] = -acc / Rational(static_cast<long>(k + 1));
    }
    return b;
}

/// zeta(s) for integer s >= 2 by Euler-Maclaurin summation. The remainder
/// after the last correction is bounded by the first omitted correction term
/// (valid for real s > 1), which is reported as the error bound.
inline HighReal zeta(unsigned s, unsigned digits) {
    if (s < 2) throw std::invalid_argument("zeta: s must be >= 2");
    check_digits(digits);
    const Real eps = tolerance(digits + 2);
    const unsigned N = 10 + 2 * digits;
    const Real n_real = N;
    Real sum = 0;
    for (unsigned k = 1; k < N; ++k) sum += boost::multiprecision::pow(Real(k), -static_cast<int>(s));
    const Real n_pow = boost::multiprecision::pow(n_real, -static_cast<int>(s));  // N^{-s}
    sum += n_real * n_pow / Real(s - 1) + n_pow / 2;

    const std::size_t max_j = 60;
    static const std::vector<Rational> bern = bernoulli_numbers(2 * max_j + 2);
    // term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}
    Real rising = s;             // s(s+1)...(s+2j-2) for j = 1
    Real npow = n_pow / n_real;  // N^{-s-1}
    Real fact = 2;               // (2j)!
    for (std::size_t j = 1; j <= max_j; ++j) {
        Real term = to_real(bern[2 * j]) / fact * rising * npow;
        if (abs(term) < eps) {
            return {sum, abs(term), digits};
        }
        sum += term;
        rising *= Real(s + 2 * j - 1) * Real(s + 2 * j);
        npow /= n_real * n_real;
        fact *= Real(2 * j + 1) * Real(2 * j + 2);
    }
    throw std::logic_error("zeta: Euler-Maclaurin correction did not converge");
}

}  // namespace treepgf
