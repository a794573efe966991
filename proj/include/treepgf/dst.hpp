#pragma once

/**
 * @file dst.hpp
 * @brief Exact PGFs and moments for digital search trees.
 *
 * Infinite-key recursions (root takes the first key, the remaining n-1 keys
 * split Binomial(n-1, 1/2) between the subtrees):
 *
 *   path length   f_n(z) = z^{n-1} 2^{1-n} sum_k C(n-1,k) f_k f_{n-1-k},  f_0 = 1
 *   unsuccessful  U_n(z) = z 2^{1-n} sum_k C(n-1,k) U_k(z),               U_0 = 1
 *   successful    S_n(z) = z/n + (2z/n) 2^{1-n} sum_k C(n-1,k) k S_k(z),  S_1 = z
 *
 * The two search recursions are checked against the small-n reference tables
 * and the enumeration oracle in the test suite. Finite-key PGFs have no
 * recursion; they come from the reference tables or from enumeration.
 */

#include <treepgf/moments.hpp>
#include <treepgf/path_length.hpp>
#include <treepgf/poly.hpp>
#include <treepgf/rational.hpp>
#include <treepgf/types.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace treepgf::dst {

namespace detail {

struct BinomialSplit {
    Rational operator()(std::size_t n, std::size_t k) const {
        return Rational(binomial(n - 1, k)) * pow2(1 - static_cast<long>(n));
    }
};

inline treepgf::detail::PathLengthPgfCache& path_length_cache() {
    static treepgf::detail::PathLengthPgfCache cache;
    return cache;
}

}  // namespace detail

inline Poly path_length_pgf(std::size_t n) {
    return detail::path_length_cache().get(n, detail::BinomialSplit{});
}

/// g_n = n-1 + 2^{2-n} sum C(n-1,k) g_k, and the matching h_n recursion.
inline Moments path_length_moments(std::size_t n) {
    std::vector<Rational> g(n + 1), h(n + 1);
    for (std::size_t m = 1; m <= n; ++m) {
        const long mm = static_cast<long>(m);
        const Rational scale = pow2(2 - mm);
        Rational gsum, hsum, conv;
        for (std::size_t k = 0; k < m; ++k) {
            Rational c(binomial(m - 1, k));
            if (!g[k].is_zero()) gsum += c * g[k];
            if (!h[k].is_zero()) hsum += c * h[k];
        }
        g[m] = Rational(mm - 1) + scale * gsum;
        for (std::size_t k = 0; k < m; ++k) {
            if (g[k].is_zero() || g[m - 1 - k].is_zero()) continue;
            conv += Rational(binomial(m - 1, k)) * g[k] * g[m - 1 - k];
        }
        h[m] = Rational(-(mm - 1) * mm) + Rational(2 * (mm - 1)) * g[m] + scale * conv + scale * hsum;
    }
    return Moments::from_factorial(n, g[n], h[n]);
}

/// f_m^{(r)}(1) of the infinite-key path length for m = 0..n.
inline std::vector<FactorialMomentVector> path_length_factorial_moment_sequence(std::size_t n, unsigned order) {
    if (order < 1 || order > 8) throw std::invalid_argument("dst::path_length_factorial_moments: order must be in 1..8");
    auto table = treepgf::detail::path_length_factorial_moment_table(n, order, detail::BinomialSplit{});
    std::vector<FactorialMomentVector> out;
    for (std::size_t m = 0; m < table.size(); ++m) out.push_back({m, std::move(table[m])});
    return out;
}

inline Poly unsuccessful_pgf_infinite(std::size_t n) {
    std::vector<Poly> u{Poly::constant(1)};
    for (std::size_t m = 1; m <= n; ++m) {
        Poly acc;
        for (std::size_t k = 0; k < m; ++k) acc += u[k] * Rational(binomial(m - 1, k));
        u.push_back((acc * pow2(1 - static_cast<long>(m))).shifted(1));
    }
    return u[n];
}

inline Poly successful_pgf_infinite(std::size_t n) {
    if (n == 0) throw std::invalid_argument("dst::successful_pgf_infinite: n must be >= 1");
    std::vector<Poly> s{Poly{}, Poly::monomial(1)};
    for (std::size_t m = 2; m <= n; ++m) {
        const long mm = static_cast<long>(m);
        Poly acc;
        for (std::size_t k = 1; k < m; ++k) acc += s[k] * Rational(binomial(m - 1, k) * static_cast<unsigned long>(k));
        Poly next = (acc * (Rational(2, mm) * pow2(1 - mm))).shifted(1) + Poly::monomial(1, Rational(1, mm));
        s.push_back(std::move(next));
    }
    return s[n];
}

/// Covariance of the successful costs of two distinct, uniformly chosen keys
/// of one infinite-key tree. The n costs sum to L_n + n, so expanding
/// Var(sum) gives [Var(L_n) - n Var(S_n)] / (n (n-1)).
inline Rational successful_pair_covariance(std::size_t n) {
    if (n < 2) throw std::invalid_argument("dst::successful_pair_covariance: n must be >= 2");
    const Rational nn(static_cast<long>(n));
    return (path_length_moments(n).variance - nn * pgf_variance(successful_pgf_infinite(n)))
         / (nn * Rational(static_cast<long>(n - 1)));
}

/// Reference small-n PGF tables, n = 2..5. Infinite-key path length is not
/// tabulated (its recursion is exact).
inline Poly golden_table(Search search, Keys keys, std::size_t n) {
    if (n < 2 || n > 5) throw std::out_of_range("dst::golden_table: n must be in 2..5, got " + std::to_string(n));
    auto r = [](const char* s) { return Rational::parse(s); };
    auto from = [&](std::size_t lowest, std::initializer_list<const char*> cs) {
        std::vector<Rational> v(lowest);
        for (const char* c : cs) v.push_back(r(c));
        return Poly(std::move(v));
    };
    const std::size_t i = n - 2;
    if (search == Search::unsuccessful && keys == Keys::infinite) {
        const Poly t[] = {
            from(1, {"1/2", "1/2"}),
            from(1, {"1/4", "5/8", "1/8"}),
            from(1, {"1/8", "19/32", "17/64", "1/64"}),
            from(1, {"1/16", "65/128", "195/512", "49/1024", "1/1024"}),
        };
        return t[i];
    }
    if (search == Search::unsuccessful && keys == Keys::finite) {
        const Poly t[] = {
            from(1, {"2/3", "1/3"}),
            from(1, {"2/7", "2/3", "1/21"}),
            from(1, {"8/65", "302/455", "22/105", "1/273"}),
            from(1, {"52/899", "7384/13485", "34502/94395", "26/899", "1/6293"}),
        };
        return t[i];
    }
    if (search == Search::successful && keys == Keys::infinite) {
        const Poly t[] = {
            from(1, {"1/2", "1/2"}),
            from(1, {"1/3", "1/2", "1/6"}),
            from(1, {"1/4", "7/16", "9/32", "1/32"}),
            from(1, {"1/5", "3/8", "11/32", "5/64", "1/320"}),
        };
        return t[i];
    }
    if (search == Search::successful && keys == Keys::finite) {
        const Poly t[] = {
            from(1, {"1/2", "1/2"}),
            from(1, {"1/3", "11/21", "1/7"}),
            from(1, {"1/4", "9/20", "39/140", "3/140"}),
            from(1, {"1/5", "1707/4495", "23561/67425", "4657/67425", "39/22475"}),
        };
        return t[i];
    }
    if (search == Search::path_length && keys == Keys::finite) {
        const Poly t[] = {
            from(1, {"1"}),
            from(2, {"4/7", "3/7"}),
            from(4, {"4/5", "4/35", "3/35"}),
            from(6, {"8984/13485", "3136/13485", "364/4495", "52/4495", "39/4495"}),
        };
        return t[i];
    }
    throw std::invalid_argument("dst::golden_table: no reference table for infinite-key path length");
}

}  // namespace treepgf::dst
