#pragma once

/**
 * @file cumulants.hpp
 * @brief Limiting cumulant constants of BST total path length.
 *
 * Tiered binomial coefficients T(i, n, m) are the coefficients of x^n y^m in
 *
 *     f(i, x, y) = 1/(i + 1 - x - y) * C(i - x, i) / C(i - x - y, i),
 *
 * with C(i - t, i) = prod_{j=1}^{i} (j - t) / i!. They feed a recurrence for
 * the rationals c_s (c_0 = 1, c_1 = 0), which play the role of limiting
 * central moments; a_s follows from c_1..c_s through partial Bell
 * polynomials, and the order-s cumulant of L_n grows like
 *
 *     [a_s + (-1)^{s+1} 2^s (s-1)! zeta(s)] n^s.
 */

#include <treepgf/biseries.hpp>
#include <treepgf/high_real.hpp>
#include <treepgf/poly.hpp>
#include <treepgf/rational.hpp>

#include <nlohmann/json.hpp>

#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace treepgf::cumulants {

inline constexpr unsigned kMaxOrder = 8;

namespace detail {

/// C(i - t, i) as a polynomial in t.
inline Poly shifted_binomial_poly(std::size_t i) {
    Poly p = Poly::constant(1);
    for (std::size_t j = 1; j <= i; ++j) p = p * Poly{Rational(static_cast<long>(j)), Rational(-1)};
    return p * Rational(BigInt(1), factorial(i));
}

/// Coefficients of f(i, x, y), memoised per i and grown when larger orders are requested.
class TieredSeriesCache {
public:
    Rational coeff(std::size_t i, std::size_t order_x, std::size_t order_y) {
        std::lock_guard lock(mu_);
        auto it = cache_.find(i);
        if (it != cache_.end() && it->second.order_x() >= order_x && it->second.order_y() >= order_y)
            return it->second.coeff(order_x, order_y);
        const std::size_t nx = std::max<std::size_t>(order_x, 8);
        const std::size_t ny = std::max<std::size_t>(order_y, 8);
        const Poly b = shifted_binomial_poly(i);
        BiSeries numer = BiSeries::from_poly_x(b, nx, ny);
        BiSeries denom = BiSeries::from_poly_x_plus_y(b, nx, ny);
        BiSeries pole = BiSeries::from_poly_x_plus_y(Poly{Rational(static_cast<long>(i + 1)), Rational(-1)}, nx, ny);
        BiSeries f = biseries_invert(pole) * numer * biseries_invert(denom);
        auto [pos, inserted] = cache_.insert_or_assign(i, std::move(f));
        return pos->second.coeff(order_x, order_y);
    }

private:
    std::mutex mu_;
    std::map<std::size_t, BiSeries> cache_;
};

inline TieredSeriesCache& tiered_cache() {
    static TieredSeriesCache cache;
    return cache;
}

inline BigInt multinomial3(unsigned a, unsigned b, unsigned c) {
    return factorial(a + b + c) / (factorial(a) * factorial(b) * factorial(c));
}

}  // namespace detail

/// Coefficient of x^n y^m in f(i, x, y); T(0, n, m) = C(n + m, n), T(i, 0, 0) = 1/(1 + i).
inline Rational tiered_binomial(std::size_t i, std::size_t n, std::size_t m) {
    return detail::tiered_cache().coeff(i, n, m);
}

/// Partial Bell polynomial B_{s,j}(x_1, ..., x_{s-j+1}); xs[0] holds x_1.
inline Rational partial_bell(std::size_t s, std::size_t j, const std::vector<Rational>& xs) {
    if (j > s) return {};
    if (s == 0) return Rational(j == 0 ? 1 : 0);
    if (j == 0) return {};
    if (xs.size() < s - j + 1)
        throw std::invalid_argument("partial_bell: need " + std::to_string(s - j + 1) + " arguments, got "
                                    + std::to_string(xs.size()));
    // table[a][b] = B_{a,b}; B_{a,b} = sum_k C(a-1, k-1) x_k B_{a-k, b-1}
    std::vector<std::vector<Rational>> table(s + 1, std::vector<Rational>(j + 1));
    table[0][0] = 1;
    for (std::size_t b = 1; b <= j; ++b)
        for (std::size_t a = b; a <= s; ++a) {
            Rational acc;
            for (std::size_t k = 1; k <= a - b + 1; ++k) {
                const auto& prev = table[a - k][b - 1];
                if (prev.is_zero() || xs[k - 1].is_zero()) continue;
                acc += Rational(binomial(a - 1, k - 1)) * xs[k - 1] * prev;
            }
            table[a][b] = acc;
        }
    return table[s][j];
}

/// Cumulant kappa_s from moments (x_1 = mean or 0 for central moments, x_2, ...):
/// sum_j (-1)^{j-1} (j-1)! B_{s,j}(x_1, ..., x_{s-j+1}).
inline Rational cumulant_from_moments(std::size_t s, const std::vector<Rational>& moments) {
    Rational acc;
    for (std::size_t j = 1; j <= s; ++j) {
        Rational term = Rational(factorial(j - 1)) * partial_bell(s, j, moments);
        if (j % 2 == 0) acc -= term; else acc += term;
    }
    return acc;
}

/// c_0 .. c_S.
inline std::vector<Rational> hennequin_c_sequence(unsigned max_s) {
    if (max_s > kMaxOrder) throw std::invalid_argument("hennequin_c: order must be <= 8");
    std::vector<Rational> c(max_s + 1);
    c[0] = 1;
    if (max_s >= 1) c[1] = 0;
    for (unsigned s = 2; s <= max_s; ++s) {
        Rational total;
        for (unsigned k1 = 0; k1 < s; ++k1)
            for (unsigned k2 = 0; k2 < s; ++k2) {
                if (k1 + k2 > s) continue;
                const unsigned k3 = s - k1 - k2;
                if (c[k1].is_zero() || c[k2].is_zero()) continue;
                Rational inner;
                for (unsigned n = 0; n <= k3; ++n)
                    for (unsigned m = 0; n + m <= k3; ++m) {
                        const unsigned p = k3 - n - m;
                        const Rational weight = Rational(detail::multinomial3(n, m, p) * factorial(n) * factorial(m))
                                              * pow(Rational(-2), n + m);
                        Rational jsum;
                        for (unsigned j = 0; j <= m + k2; ++j) {
                            Rational t = Rational(binomial(m + k2, j)) * tiered_binomial(n + k1 + j, n, m);
                            if (j % 2 == 0) jsum += t; else jsum -= t;
                        }
                        inner += weight * jsum;
                    }
                total += Rational(detail::multinomial3(k1, k2, k3)) * c[k1] * c[k2] * inner;
            }
        c[s] = Rational(static_cast<long>(s + 1), static_cast<long>(s - 1)) * total;
    }
    return c;
}

inline Rational hennequin_c(unsigned s) { return hennequin_c_sequence(s)[s]; }

/// a_s from c_1..c_s, for 2 <= s <= 8.
inline Rational hennequin_a(unsigned s) {
    if (s < 2 || s > kMaxOrder) throw std::invalid_argument("hennequin_a: order must be in 2..8");
    auto c = hennequin_c_sequence(s);
    return cumulant_from_moments(s, std::vector<Rational>(c.begin() + 1, c.end()));
}

/// a_s + (-1)^{s+1} 2^s (s-1)! zeta(s).
inline HighReal kappa_leading_constant(unsigned s, const Rational& a_s, unsigned digits) {
    HighReal z = zeta(s, digits);
    Real scale = Real(factorial(s - 1).get_str()) * boost::multiprecision::pow(Real(2), static_cast<int>(s));
    if (s % 2 == 0) scale = -scale;
    return {to_real(a_s) + scale * z.value, abs(scale) * z.error_bound, digits};
}

inline HighReal kappa_leading_constant(unsigned s, unsigned digits) {
    return kappa_leading_constant(s, hennequin_a(s), digits);
}

struct CumulantTable {
    unsigned max_order = 0;
    std::vector<Rational> c;            // c_0..c_S
    std::vector<Rational> a;            // index s, entries 2..S meaningful
    std::vector<HighReal> kappa_const;  // index s, entries 2..S meaningful

    nlohmann::json to_json() const {
        auto rows = nlohmann::json::array();
        for (unsigned s = 2; s <= max_order; ++s)
            rows.push_back({{"s", s}, {"c", c[s].str()}, {"a", a[s].str()}, {"kappa_const", kappa_const[s].to_json()}});
        return rows;
    }
};

inline CumulantTable cumulant_table(unsigned max_order, unsigned digits) {
    if (max_order < 2 || max_order > kMaxOrder) throw std::invalid_argument("cumulant_table: max order must be in 2..8");
    CumulantTable t;
    t.max_order = max_order;
    t.c = hennequin_c_sequence(max_order);
    t.a.resize(max_order + 1);
    t.kappa_const.resize(max_order + 1);
    const std::vector<Rational> central(t.c.begin() + 1, t.c.end());
    for (unsigned s = 2; s <= max_order; ++s) {
        t.a[s] = cumulant_from_moments(s, central);
        t.kappa_const[s] = kappa_leading_constant(s, t.a[s], digits);
    }
    return t;
}

}  // namespace treepgf::cumulants
