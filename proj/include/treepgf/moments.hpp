#pragma once

/**
 * @file moments.hpp
 * @brief Moment records and exact conversions between moment systems.
 *
 * factorial -> raw uses Stirling numbers of the second kind, raw -> central
 * a binomial shift, and central -> cumulants the standard recursion
 * mu_r = sum_{m=2}^{r} C(r-1, m-1) kappa_m mu_{r-m}.
 */

#include <treepgf/rational.hpp>

#include <nlohmann/json.hpp>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace treepgf {

/// Mean g = f'(1), second factorial moment h = f''(1), variance h - g^2 + g.
struct Moments {
    std::size_t n = 0;
    Rational g;
    Rational h;
    Rational variance;

    static Moments from_factorial(std::size_t n, Rational g, Rational h) {
        Moments m{n, std::move(g), std::move(h), {}};
        m.variance = m.h - m.g * m.g + m.g;
        return m;
    }

    nlohmann::json to_json() const {
        return {{"n", n}, {"mean", g.str()}, {"second_factorial_moment", h.str()}, {"variance", variance.str()}};
    }
};

/// m[r] = f^{(r)}(1), r = 0..R; m[0] == 1 for a PGF.
struct FactorialMomentVector {
    std::size_t n = 0;
    std::vector<Rational> m;

    nlohmann::json to_json() const {
        auto arr = nlohmann::json::array();
        for (const auto& x : m) arr.push_back(x.str());
        return {{"n", n}, {"factorial_moments", arr}};
    }
};

/// S(r, j) for 0 <= j <= r <= max_r.
inline std::vector<std::vector<BigInt>> stirling2_table(std::size_t max_r) {
    std::vector<std::vector<BigInt>> s(max_r + 1, std::vector<BigInt>(max_r + 1, 0));
    s[0][0] = 1;
    for (std::size_t r = 1; r <= max_r; ++r)
        for (std::size_t j = 1; j <= r; ++j) s[r][j] = BigInt(static_cast<unsigned long>(j)) * s[r - 1][j] + s[r - 1][j - 1];
    return s;
}

/// E[X^r] from E[X(X-1)...(X-r+1)].
inline std::vector<Rational> factorial_to_raw(const std::vector<Rational>& fact) {
    if (fact.empty()) return {};
    auto s2 = stirling2_table(fact.size() - 1);
    std::vector<Rational> raw(fact.size());
    for (std::size_t r = 0; r < fact.size(); ++r)
        for (std::size_t j = 0; j <= r; ++j)
            if (s2[r][j] != 0) raw[r] += Rational(s2[r][j]) * fact[j];
    return raw;
}

/// E[(X - mu)^r] from raw moments; raw[0] must be 1.
inline std::vector<Rational> raw_to_central(const std::vector<Rational>& raw) {
    if (raw.empty()) return {};
    std::vector<Rational> central(raw.size());
    const Rational mu = raw.size() > 1 ? raw[1] : Rational{};
    for (std::size_t r = 0; r < raw.size(); ++r) {
        Rational acc;
        Rational neg_mu_pow = 1;  // (-mu)^{r-i}, built from i = r downward
        for (std::size_t k = 0; k <= r; ++k) {
            std::size_t i = r - k;
            acc += Rational(binomial(r, i)) * raw[i] * neg_mu_pow;
            neg_mu_pow *= -mu;
        }
        central[r] = acc;
    }
    return central;
}

/// Cumulants kappa_1..kappa_R (index 0 unused, set to 0) from the mean and
/// central moments mu_0..mu_R.
inline std::vector<Rational> central_to_cumulants(const Rational& mean, const std::vector<Rational>& central) {
    std::vector<Rational> kappa(central.size());
    if (central.size() > 1) kappa[1] = mean;
    for (std::size_t r = 2; r < central.size(); ++r) {
        Rational acc = central[r];
        for (std::size_t m = 2; m < r; ++m) acc -= Rational(binomial(r - 1, m - 1)) * kappa[m] * central[r - m];
        kappa[r] = acc;
    }
    return kappa;
}

/// Cumulants kappa_1..kappa_R from factorial moments f^{(0..R)}(1).
inline std::vector<Rational> factorial_to_cumulants(const std::vector<Rational>& fact) {
    if (fact.empty() || fact[0] != Rational(1))
        throw std::invalid_argument("factorial_to_cumulants: zeroth factorial moment must be 1");
    auto raw = factorial_to_raw(fact);
    auto central = raw_to_central(raw);
    return central_to_cumulants(raw.size() > 1 ? raw[1] : Rational{}, central);
}

}  // namespace treepgf
