#pragma once

/**
 * @file biseries.hpp
 * @brief Truncated bivariate power series in x, y with Rational coefficients.
 *
 * A BiSeries carries its truncation orders (N in x, M in y); coefficients of
 * x^i y^j with i > N or j > M are discarded. Binary operations truncate to the
 * smaller of the two orders in each variable.
 */

#include <treepgf/poly.hpp>
#include <treepgf/rational.hpp>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace treepgf {

class singular_series : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class BiSeries {
public:
    BiSeries(std::size_t order_x, std::size_t order_y)
        : nx_(order_x), ny_(order_y), c_((order_x + 1) * (order_y + 1)) {}

    static BiSeries constant(const Rational& c, std::size_t order_x, std::size_t order_y) {
        BiSeries s(order_x, order_y);
        s.at(0, 0) = c;
        return s;
    }

    /// p(x) embedded as a series.
    static BiSeries from_poly_x(const Poly& p, std::size_t order_x, std::size_t order_y) {
        BiSeries s(order_x, order_y);
        for (std::size_t i = 0; i <= std::min(order_x, p.degree()); ++i) s.at(i, 0) = p[i];
        return s;
    }

    /// p(x + y) expanded binomially.
    static BiSeries from_poly_x_plus_y(const Poly& p, std::size_t order_x, std::size_t order_y) {
        BiSeries s(order_x, order_y);
        if (p.is_zero()) return s;
        for (std::size_t d = 0; d <= p.degree(); ++d) {
            if (p[d].is_zero()) continue;
            for (std::size_t i = 0; i <= std::min(d, order_x); ++i) {
                std::size_t j = d - i;
                if (j > order_y) continue;
                s.at(i, j) += p[d] * Rational(binomial(d, i));
            }
        }
        return s;
    }

    std::size_t order_x() const { return nx_; }
    std::size_t order_y() const { return ny_; }

    const Rational& at(std::size_t i, std::size_t j) const { return c_.at(i * (ny_ + 1) + j); }
    Rational& at(std::size_t i, std::size_t j) { return c_.at(i * (ny_ + 1) + j); }

    /// Coefficient of x^i y^j, zero beyond truncation.
    Rational coeff(std::size_t i, std::size_t j) const {
        return (i <= nx_ && j <= ny_) ? at(i, j) : Rational{};
    }

    BiSeries truncated(std::size_t order_x, std::size_t order_y) const {
        BiSeries out(std::min(order_x, nx_), std::min(order_y, ny_));
        for (std::size_t i = 0; i <= out.nx_; ++i)
            for (std::size_t j = 0; j <= out.ny_; ++j) out.at(i, j) = at(i, j);
        return out;
    }

    friend BiSeries operator+(const BiSeries& a, const BiSeries& b) {
        BiSeries out(std::min(a.nx_, b.nx_), std::min(a.ny_, b.ny_));
        for (std::size_t i = 0; i <= out.nx_; ++i)
            for (std::size_t j = 0; j <= out.ny_; ++j) out.at(i, j) = a.at(i, j) + b.at(i, j);
        return out;
    }

    friend BiSeries operator-(const BiSeries& a, const BiSeries& b) {
        BiSeries out(std::min(a.nx_, b.nx_), std::min(a.ny_, b.ny_));
        for (std::size_t i = 0; i <= out.nx_; ++i)
            for (std::size_t j = 0; j <= out.ny_; ++j) out.at(i, j) = a.at(i, j) - b.at(i, j);
        return out;
    }

    friend BiSeries operator*(const BiSeries& a, const BiSeries& b) {
        BiSeries out(std::min(a.nx_, b.nx_), std::min(a.ny_, b.ny_));
        for (std::size_t i1 = 0; i1 <= out.nx_; ++i1)
            for (std::size_t j1 = 0; j1 <= out.ny_; ++j1) {
                const auto& x = a.at(i1, j1);
                if (x.is_zero()) continue;
                for (std::size_t i2 = 0; i1 + i2 <= out.nx_; ++i2)
                    for (std::size_t j2 = 0; j1 + j2 <= out.ny_; ++j2) {
                        const auto& y = b.at(i2, j2);
                        if (!y.is_zero()) out.at(i1 + i2, j1 + j2) += x * y;
                    }
            }
        return out;
    }

    friend bool operator==(const BiSeries&, const BiSeries&) = default;

private:
    std::size_t nx_;
    std::size_t ny_;
    std::vector<Rational> c_;  // row-major in x
};

/// Multiplicative inverse to the same truncation orders. Throws singular_series
/// when the constant term vanishes.
inline BiSeries biseries_invert(const BiSeries& a) {
    const Rational& a00 = a.at(0, 0);
    if (a00.is_zero()) throw singular_series("biseries_invert: zero constant term");
    const Rational inv00 = Rational(1) / a00;
    BiSeries b(a.order_x(), a.order_y());
    // b_ij = -(1/a00) * sum_{(k,l) != (0,0)} a_kl b_{i-k, j-l}, filled in graded order.
    for (std::size_t i = 0; i <= a.order_x(); ++i)
        for (std::size_t j = 0; j <= a.order_y(); ++j) {
            if (i == 0 && j == 0) {
                b.at(0, 0) = inv00;
                continue;
            }
            Rational acc;
            for (std::size_t k = 0; k <= i; ++k)
                for (std::size_t l = 0; l <= j; ++l) {
                    if (k == 0 && l == 0) continue;
                    const auto& akl = a.at(k, l);
                    if (!akl.is_zero()) acc += akl * b.at(i - k, j - l);
                }
            b.at(i, j) = -acc * inv00;
        }
    return b;
}

}  // namespace treepgf
