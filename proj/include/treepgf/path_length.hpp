#pragma once

/**
 * @file path_length.hpp
 * @brief Shared machinery for total-path-length recursions of the form
 *
 *     f_n(z) = z^{n-1} * sum_{k=0}^{n-1} w(n,k) f_k(z) f_{n-1-k}(z),  f_0 = 1,
 *
 * where w(n, k) is a split probability: 1/n for binary search trees and
 * 2^{1-n} C(n-1, k) for digital search trees. Both the full polynomials and
 * the factorial moments f_n^{(r)}(1) (via the generalised Leibniz rule, never
 * forming the polynomials) are provided.
 */

#include <treepgf/poly.hpp>
#include <treepgf/rational.hpp>

#include <concepts>
#include <cstddef>
#include <mutex>
#include <vector>

namespace treepgf::detail {

template <typename T>
concept SplitWeight = requires(const T& w, std::size_t n, std::size_t k) {
    { w(n, k) } -> std::convertible_to<Rational>;
};

/// Thread-safe memo of f_0, f_1, ... for one weight family. Entries are only
/// published once complete.
class PathLengthPgfCache {
public:
    template <SplitWeight W>
    Poly get(std::size_t n, const W& weight) {
        std::lock_guard lock(mu_);
        if (table_.empty()) table_.push_back(Poly::constant(1));
        while (table_.size() <= n) {
            std::size_t m = table_.size();
            Poly acc;
            for (std::size_t k = 0; k < m; ++k) {
                Rational w = weight(m, k);
                if (w.is_zero()) continue;
                acc += (table_[k] * table_[m - 1 - k]) * w;
            }
            table_.push_back(acc.shifted(m - 1));
        }
        return table_[n];
    }

private:
    std::mutex mu_;
    std::vector<Poly> table_;
};

/// fm[n][r] = f_n^{(r)}(1) for n = 0..n_max, r = 0..order.
template <SplitWeight W>
std::vector<std::vector<Rational>> path_length_factorial_moment_table(std::size_t n_max, unsigned order, const W& weight) {
    std::vector<std::vector<BigInt>> binom(order + 1, std::vector<BigInt>(order + 1, 0));
    for (unsigned q = 0; q <= order; ++q)
        for (unsigned j = 0; j <= q; ++j) binom[q][j] = binomial(q, j);

    std::vector<std::vector<Rational>> fm(n_max + 1, std::vector<Rational>(order + 1));
    fm[0][0] = 1;
    std::vector<Rational> a(order + 1);  // A_n^{(q)}(1)
    for (std::size_t n = 1; n <= n_max; ++n) {
        for (auto& x : a) x = Rational{};
        for (std::size_t k = 0; k < n; ++k) {
            Rational w = weight(n, k);
            if (w.is_zero()) continue;
            const auto& left = fm[k];
            const auto& right = fm[n - 1 - k];
            for (unsigned q = 0; q <= order; ++q) {
                Rational conv;
                for (unsigned j = 0; j <= q; ++j) {
                    if (left[j].is_zero() || right[q - j].is_zero()) continue;
                    conv += Rational(binom[q][j]) * left[j] * right[q - j];
                }
                if (!conv.is_zero()) a[q] += w * conv;
            }
        }
        // d^r/dz^r [z^{n-1} A_n(z)] at z = 1
        for (unsigned r = 0; r <= order; ++r) {
            Rational acc;
            for (unsigned i = 0; i <= r; ++i) {
                BigInt fall = falling_factorial(n - 1, i);
                if (fall == 0) break;
                acc += Rational(binom[r][i] * fall) * a[r - i];
            }
            fm[n][r] = acc;
        }
    }
    return fm;
}

}  // namespace treepgf::detail
