#pragma once

/**
 * @file bst.hpp
 * @brief Exact PGFs and moments for random binary search trees.
 *
 * Three cost families, all under the random-permutation model:
 *   - unsuccessful search cost K_n (n >= 1),
 *   - successful search cost K_n (n >= 1),
 *   - total internal path length L_n (n >= 0).
 *
 * Moments come from scalar recursions on f^{(r)}(1); the polynomial forms are
 * intended for small n (the path-length PGF has degree n(n-1)/2 and its
 * memo grows roughly as n^3 rationals).
 */

#include <treepgf/moments.hpp>
#include <treepgf/path_length.hpp>
#include <treepgf/poly.hpp>
#include <treepgf/rational.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace treepgf::bst {

namespace detail {

inline void require_positive(std::size_t n, const char* what) {
    if (n == 0) throw std::invalid_argument(std::string(what) + ": n must be >= 1");
}

struct UniformSplit {
    Rational operator()(std::size_t n, std::size_t) const { return Rational(1, static_cast<long>(n)); }
};

inline treepgf::detail::PathLengthPgfCache& path_length_cache() {
    static treepgf::detail::PathLengthPgfCache cache;
    return cache;
}

}  // namespace detail

/// f_n(z) = ((2z + n - 1)/(n + 1)) f_{n-1}(z), f_1(z) = z.
inline Poly unsuccessful_pgf(std::size_t n) {
    detail::require_positive(n, "bst::unsuccessful_pgf");
    Poly f = Poly::monomial(1);
    for (std::size_t m = 2; m <= n; ++m) {
        Rational d(1, static_cast<long>(m + 1));
        f = f * Poly{Rational(static_cast<long>(m - 1)) * d, Rational(2) * d};
    }
    return f;
}

/// g_n = 2/(n+1) + g_{n-1}, h_n = 4 g_{n-1}/(n+1) + h_{n-1}; g_1 = 1, h_1 = 0.
inline Moments unsuccessful_moments(std::size_t n) {
    detail::require_positive(n, "bst::unsuccessful_moments");
    Rational g = 1, h = 0;
    for (std::size_t m = 2; m <= n; ++m) {
        Rational d(1, static_cast<long>(m + 1));
        h += Rational(4) * d * g;
        g += Rational(2) * d;
    }
    return Moments::from_factorial(n, g, h);
}

/// n^2 f_n(z) = (n-1)(2z + n - 1) f_{n-1}(z) + z, f_1(z) = z.
inline Poly successful_pgf(std::size_t n) {
    detail::require_positive(n, "bst::successful_pgf");
    Poly f = Poly::monomial(1);
    for (std::size_t m = 2; m <= n; ++m) {
        const long mm = static_cast<long>(m);
        Rational inv_sq(1, mm * mm);
        Poly step{Rational((mm - 1) * (mm - 1)) * inv_sq, Rational(2 * (mm - 1)) * inv_sq};
        f = f * step + Poly::monomial(1, inv_sq);
    }
    return f;
}

/// g_n = ((2n-1) + (n^2-1) g_{n-1})/n^2, h_n = (4(n-1) g_{n-1} + (n^2-1) h_{n-1})/n^2.
inline Moments successful_moments(std::size_t n) {
    detail::require_positive(n, "bst::successful_moments");
    Rational g = 1, h = 0;
    for (std::size_t m = 2; m <= n; ++m) {
        const long mm = static_cast<long>(m);
        Rational inv_sq(1, mm * mm);
        Rational next_h = (Rational(4 * (mm - 1)) * g + Rational(mm * mm - 1) * h) * inv_sq;
        g = (Rational(2 * mm - 1) + Rational(mm * mm - 1) * g) * inv_sq;
        h = std::move(next_h);
    }
    return Moments::from_factorial(n, g, h);
}

/// f_n(z) = (z^{n-1}/n) sum_k f_k(z) f_{n-1-k}(z), f_0 = 1. Memoised process-wide.
inline Poly path_length_pgf(std::size_t n) {
    return detail::path_length_cache().get(n, detail::UniformSplit{});
}

/// g_0..g_n with g_n = n - 1 + (2/n) sum_{k<n} g_k; linear time.
inline std::vector<Rational> path_length_means(std::size_t n) {
    std::vector<Rational> g(n + 1);
    Rational prefix;  // sum_{k < m} g_k
    for (std::size_t m = 1; m <= n; ++m) {
        prefix += g[m - 1];
        g[m] = Rational(static_cast<long>(m) - 1) + Rational(2, static_cast<long>(m)) * prefix;
    }
    return g;
}

/// Exact g_n, h_n and variance of L_n via the quadratic-time scalar recursions.
inline Moments path_length_moments(std::size_t n) {
    std::vector<Rational> g(n + 1), h(n + 1);
    Rational g_prefix, h_prefix;
    for (std::size_t m = 1; m <= n; ++m) {
        const long mm = static_cast<long>(m);
        g_prefix += g[m - 1];
        h_prefix += h[m - 1];
        g[m] = Rational(mm - 1) + Rational(2, mm) * g_prefix;
        Rational conv;
        for (std::size_t k = 0; k < m; ++k) {
            if (g[k].is_zero() || g[m - 1 - k].is_zero()) continue;
            conv += g[k] * g[m - 1 - k];
        }
        h[m] = Rational(-(mm - 1) * mm) + Rational(2 * (mm - 1)) * g[m] + Rational(2, mm) * conv
             + Rational(2, mm) * h_prefix;
    }
    return Moments::from_factorial(n, g[n], h[n]);
}

/// f_m^{(r)}(1) for every m = 0..n and r = 0..order (order <= 8).
inline std::vector<FactorialMomentVector> path_length_factorial_moment_sequence(std::size_t n, unsigned order) {
    if (order < 1 || order > 8) throw std::invalid_argument("bst::path_length_factorial_moments: order must be in 1..8");
    auto table = treepgf::detail::path_length_factorial_moment_table(n, order, detail::UniformSplit{});
    std::vector<FactorialMomentVector> out;
    out.reserve(table.size());
    for (std::size_t m = 0; m < table.size(); ++m) out.push_back({m, std::move(table[m])});
    return out;
}

inline FactorialMomentVector path_length_factorial_moments(std::size_t n, unsigned order) {
    return path_length_factorial_moment_sequence(n, order).back();
}

}  // namespace treepgf::bst
