#pragma once

/**
 * @file asymptotics.hpp
 * @brief Digital-search constants and large-n expansions for both tree kinds.
 *
 * Constants:
 *   alpha = sum_{j>=1} 1/(2^j - 1),  beta = sum_{j>=1} 1/(2^j - 1)^2,
 *   Q = prod_{j>=1} (1 - 2^{-j}),  Q_l its l-th partial product,
 *   phi(x) = (x - ln x - 1)/(x - 1)^2 (1/2 at x = 1),
 *   C = (Q/ln 2) sum_{j,k,l>=0} (-1)^j / (Q_j Q_k Q_l) 2^{-j(j+1)/2-k-l} phi(2^{-j-k} + 2^{-j-l}),
 *   D = C - 1/12 - pi^2/(6 ln^2 2) + alpha + beta.
 *
 * Truncation bound for C: for x in [1/2, 2], phi(x) <= phi(1/2) < 1; for
 * x < 1/2, (x-1)^2 >= 1/4 gives phi(x) <= -4 ln x, and x >= 2^{-j-max(k,l)}
 * so phi <= 4 ln2 (j+k+l). Hence phi <= (1+3j)(1+3k)(1+3l) on every term, and
 * with 1/(Q_j Q_k Q_l) <= Q^{-3} the omitted region is bounded by
 * Q^{-3} [A_{>J} B^2 + 2 A B_{>K}] with A(j) = 2^{-j(j+1)/2}(1+3j),
 * B(k) = 2^{-k}(1+3k), B = sum B(k) = 8, B_{>K} = (3K+7) 2^{-K}, and
 * A_{>J} <= 2 A(J+1) for J >= 1.
 *
 * The triple sum is accumulated in the fixed order j, then k, then l.
 */

#include <treepgf/bst.hpp>
#include <treepgf/cumulants.hpp>
#include <treepgf/dst.hpp>
#include <treepgf/high_real.hpp>
#include <treepgf/moments.hpp>
#include <treepgf/rational.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace treepgf::asymptotics {

using boost::multiprecision::abs;
using boost::multiprecision::log;
using boost::multiprecision::pow;

/// Q_l = prod_{j=1}^{l} (1 - 2^{-j}); Q_0 = 1.
inline Rational partial_Q(std::size_t l) {
    Rational q = 1;
    for (std::size_t j = 1; j <= l; ++j) q *= Rational(1) - pow2(-static_cast<long>(j));
    return q;
}

inline HighReal constant_alpha(unsigned digits) {
    check_digits(digits);
    const Real eps = tolerance(digits + 2);
    Real sum = 0;
    Real pow_j = 1;
    for (unsigned j = 1;; ++j) {
        pow_j *= 2;
        sum += 1 / (pow_j - 1);
        const Real tail = 2 / pow_j;  // sum_{i>j} 1/(2^i - 1) <= 2^{1-j}
        if (tail < eps) return {sum, tail, digits};
    }
}

inline HighReal constant_beta(unsigned digits) {
    check_digits(digits);
    const Real eps = tolerance(digits + 2);
    Real sum = 0;
    Real pow_j = 1;
    for (unsigned j = 1;; ++j) {
        pow_j *= 2;
        sum += 1 / ((pow_j - 1) * (pow_j - 1));
        const Real tail = Real(16) / (3 * pow_j * pow_j);  // (4/3) 4^{-j} * 4
        if (tail < eps) return {sum, tail, digits};
    }
}

inline HighReal constant_Q(unsigned digits) {
    check_digits(digits);
    const Real eps = tolerance(digits + 2);
    Real prod = 1;
    Real pow_j = 1;
    for (unsigned j = 1;; ++j) {
        pow_j *= 2;
        prod *= 1 - 1 / pow_j;
        const Real tail = prod / pow_j;  // Q_j - Q <= Q_j 2^{-j}
        if (tail < eps) return {prod, tail, digits};
    }
}

/// phi(x) = (x - ln x - 1)/(x - 1)^2, continuous at 1 via
/// 1/2 - t/3 + t^2/4 - ... with t = x - 1.
inline Real phi(const Real& x) {
    if (x <= 0) throw std::domain_error("phi: argument must be positive");
    const Real t = x - 1;
    if (abs(t) < Real("0.01")) {
        const Real eps = tolerance(kMaxDigits + 5);
        Real sum = 0, tk = 1;
        for (unsigned k = 0; k < 200; ++k) {
            const Real term = tk / (k + 2);
            sum += (k % 2 == 0) ? term : Real(-term);
            if (abs(term) < eps) break;
            tk *= t;
        }
        return sum;
    }
    return (x - log(x) - 1) / (t * t);
}

/// Triple sum for C truncated at j <= J, k <= K, l <= L, no tail bound.
inline Real constant_C_truncated(unsigned J, unsigned K, unsigned L) {
    const unsigned max_ab = J + std::max(K, L);
    std::vector<Real> inv_pow(max_ab + 1);  // 2^{-a}
    inv_pow[0] = 1;
    for (unsigned a = 1; a <= max_ab; ++a) inv_pow[a] = inv_pow[a - 1] / 2;
    // phi(2^{-a} + 2^{-b}) is symmetric; store a <= b.
    std::vector<std::vector<Real>> phi_tab(max_ab + 1);
    for (unsigned a = 0; a <= max_ab; ++a) {
        phi_tab[a].resize(max_ab + 1);
        for (unsigned b = a; b <= max_ab; ++b) phi_tab[a][b] = phi(inv_pow[a] + inv_pow[b]);
    }
    const unsigned max_q = std::max({J, K, L});
    std::vector<Real> inv_q(max_q + 1);  // 1/Q_j
    Real q = 1;
    inv_q[0] = 1;
    for (unsigned j = 1; j <= max_q; ++j) {
        q *= 1 - inv_pow[j];
        inv_q[j] = 1 / q;
    }
    Real total = 0;
    for (unsigned j = 0; j <= J; ++j) {
        const Real wj = inv_q[j] * pow(Real(2), -static_cast<int>(j * (j + 1) / 2));
        Real inner = 0;
        for (unsigned k = 0; k <= K; ++k) {
            const Real wk = inv_q[k] * inv_pow[k];
            Real row = 0;
            for (unsigned l = 0; l <= L; ++l) {
                const unsigned a = j + k, b = j + l;
                const Real& f = a <= b ? phi_tab[a][b] : phi_tab[b][a];
                row += inv_q[l] * inv_pow[l] * f;
            }
            inner += wk * row;
        }
        total += (j % 2 == 0) ? Real(wj * inner) : Real(-(wj * inner));
    }
    const Real Qv = constant_Q(kMaxDigits).value;
    return Qv / ln2() * total;
}

/// Smallest truncation meeting the requested precision, with certified tail.
inline HighReal constant_C(unsigned digits) {
    check_digits(digits);
    const Real eps = tolerance(digits + 2) / 3;
    const Real Qv = constant_Q(kMaxDigits).value;
    const Real pre = 1 / (Qv * Qv * Qv) * Qv / ln2();  // includes the leading Q/ln2 factor
    auto A = [](unsigned j) { return pow(Real(2), -static_cast<int>(j * (j + 1) / 2)) * (1 + 3 * j); };
    Real a_all = 0;
    for (unsigned j = 0; j < 40; ++j) a_all += A(j);
    unsigned J = 1;
    while (pre * 2 * A(J + 1) * 64 >= eps) ++J;
    unsigned K = 1;
    while (pre * 2 * a_all * 8 * (3 * K + 7) * pow(Real(2), -static_cast<int>(K)) >= eps) ++K;
    const Real bound = pre * (2 * A(J + 1) * 64 + 2 * a_all * 8 * (3 * K + 7) * pow(Real(2), -static_cast<int>(K)));
    return {constant_C_truncated(J, K, K), bound, digits};
}

inline HighReal constant_D(unsigned digits) {
    check_digits(digits);
    const HighReal c = constant_C(digits);
    const HighReal a = constant_alpha(digits);
    const HighReal b = constant_beta(digits);
    const Real l2 = ln2();
    const Real value = c.value - Real(1) / 12 - pi() * pi() / (6 * l2 * l2) + a.value + b.value;
    return {value, c.error_bound + a.error_bound + b.error_bound, digits};
}

enum class Family {
    bst_unsucc_mean,
    bst_unsucc_var,
    bst_succ_mean,
    bst_succ_var,
    bst_L_mean,
    bst_L_var,
    dst_L_mean,
    dst_L_var,
};

inline const std::vector<std::pair<std::string_view, Family>>& family_names() {
    static const std::vector<std::pair<std::string_view, Family>> names = {
        {"bst-unsucc-mean", Family::bst_unsucc_mean}, {"bst-unsucc-var", Family::bst_unsucc_var},
        {"bst-succ-mean", Family::bst_succ_mean},     {"bst-succ-var", Family::bst_succ_var},
        {"bst-L-mean", Family::bst_L_mean},           {"bst-L-var", Family::bst_L_var},
        {"dst-L-mean", Family::dst_L_mean},           {"dst-L-var", Family::dst_L_var},
    };
    return names;
}

inline Family parse_family(std::string_view s) {
    for (const auto& [name, f] : family_names())
        if (name == s) return f;
    std::string all;
    for (const auto& [name, f] : family_names()) all += (all.empty() ? "" : "|") + std::string(name);
    throw std::invalid_argument("unknown family '" + std::string(s) + "' (expected " + all + ")");
}

inline std::string to_string(Family f) {
    for (const auto& [name, g] : family_names())
        if (g == f) return std::string(name);
    return "?";
}

/// The large-n expansion evaluated at n with o(.) terms and periodic
/// fluctuations dropped.
inline Real asymptotic_prediction(Family f, std::size_t n) {
    if (n < 2) throw std::invalid_argument("asymptotic_prediction: n must be >= 2");
    const Real nn = n;
    const Real L = log(nn);
    const Real g = euler_gamma();
    const Real p2 = pi() * pi();
    switch (f) {
        case Family::bst_unsucc_mean: return 2 * L + 2 * (g - 1) + 3 / nn;
        case Family::bst_unsucc_var: return 2 * L + 2 * (g - p2 / 3 + 1) + 7 / nn;
        case Family::bst_succ_mean: return 2 * L + (2 * g - 3) + 2 * L / nn + (2 * g + 1) / nn;
        case Family::bst_succ_var:
            return 2 * L + 2 * (g - p2 / 3 + 2) - 4 * L * L / nn + 2 * (5 - 4 * g) * L / nn
                 + (5 + 10 * g - 4 * g * g - 2 * p2 / 3) / nn;
        case Family::bst_L_mean: return 2 * nn * L + 2 * (g - 2) * nn + 2 * L + (2 * g + 1);
        case Family::bst_L_var:
            return (7 - 2 * p2 / 3) * nn * nn - 2 * nn * L + (17 - 2 * g - 4 * p2 / 3) * nn - 2 * L
                 + (5 - 2 * g - 2 * p2 / 3);
        case Family::dst_L_mean: {
            const Real l2 = ln2();
            const Real alpha = constant_alpha(kMaxDigits).value;
            return nn * L / l2 + nn * ((g - 1) / l2 + Real(1) / 2 - alpha) + L / l2
                 + ((2 * g - 1) / (2 * l2) + Real(5) / 2 - alpha);
        }
        case Family::dst_L_var: {
            static const Real C = constant_C(30).value;
            return nn * C;
        }
    }
    throw std::invalid_argument("asymptotic_prediction: unknown family");
}

/// Exact value of the quantity the family's expansion describes.
inline Rational exact_value(Family f, std::size_t n) {
    switch (f) {
        case Family::bst_unsucc_mean: return bst::unsuccessful_moments(n).g;
        case Family::bst_unsucc_var: return bst::unsuccessful_moments(n).variance;
        case Family::bst_succ_mean: return bst::successful_moments(n).g;
        case Family::bst_succ_var: return bst::successful_moments(n).variance;
        case Family::bst_L_mean: return bst::path_length_means(n).back();
        case Family::bst_L_var: return bst::path_length_moments(n).variance;
        case Family::dst_L_mean: return dst::path_length_moments(n).g;
        case Family::dst_L_var: return dst::path_length_moments(n).variance;
    }
    throw std::invalid_argument("exact_value: unknown family");
}

/// Multiplier turning the raw residual into the quantity expected to decay:
/// n for o(1/n) remainders, 1 for o(1), 1/n for the per-key DST variance band.
inline Real residual_scale(Family f, std::size_t n) {
    switch (f) {
        case Family::bst_unsucc_mean:
        case Family::bst_unsucc_var:
        case Family::bst_succ_mean:
        case Family::bst_succ_var: return Real(n);
        case Family::dst_L_var: return 1 / Real(n);
        default: return 1;
    }
}

/// DST expansions carry undetermined periodic terms; only a band is observed.
inline bool decay_expected(Family f) { return f != Family::dst_L_mean && f != Family::dst_L_var; }

struct ReportRow {
    std::size_t n = 0;
    Rational exact;
    Real predicted;
    Real residual;         // |exact - predicted|
    Real scaled_residual;  // residual * residual_scale
};

struct AsymptoticReport {
    Family family = Family::bst_unsucc_mean;
    std::vector<ReportRow> rows;
    bool decay_expected = true;

    bool scaled_residuals_decreasing() const {
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (!(rows[i].scaled_residual < rows[i - 1].scaled_residual)) return false;
        return true;
    }

    nlohmann::json to_json() const {
        auto arr = nlohmann::json::array();
        for (const auto& r : rows)
            arr.push_back({{"n", r.n}, {"exact", r.exact.str()}, {"exact_decimal", to_real(r.exact).str(20)},
                           {"predicted", r.predicted.str(20)}, {"residual", r.residual.str(6, std::ios_base::scientific)},
                           {"scaled_residual", r.scaled_residual.str(6, std::ios_base::scientific)}});
        return {{"family", to_string(family)}, {"rows", arr}, {"decay_expected", decay_expected},
                {"scaled_residuals_decreasing", scaled_residuals_decreasing()}};
    }
};

inline AsymptoticReport convergence_report(Family f, const std::vector<std::size_t>& grid) {
    AsymptoticReport rep;
    rep.family = f;
    rep.decay_expected = decay_expected(f);
    for (std::size_t n : grid) {
        ReportRow row;
        row.n = n;
        row.exact = exact_value(f, n);
        row.predicted = asymptotic_prediction(f, n);
        row.residual = abs(to_real(row.exact) - row.predicted);
        row.scaled_residual = row.residual * residual_scale(f, n);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

/// kappa_s(L_n)/n^s for BST path length, s = 2..max_s, at each n of the grid,
/// next to the limiting constant.
struct KappaConvergence {
    std::vector<std::size_t> grid;
    std::vector<std::vector<Real>> normalized;  // [s][grid index]
    std::vector<HighReal> limit;                // [s]

    /// |kappa_s/n^s - limit_s| strictly decreasing along the grid.
    bool monotone(unsigned s) const {
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(abs(normalized[s][i] - limit[s].value) < abs(normalized[s][i - 1] - limit[s].value))) return false;
        return true;
    }

    nlohmann::json to_json() const {
        auto rows = nlohmann::json::array();
        for (unsigned s = 2; s < normalized.size(); ++s) {
            auto vals = nlohmann::json::array();
            for (const auto& v : normalized[s]) vals.push_back(v.str(15));
            rows.push_back({{"s", s}, {"normalized", vals}, {"limit", limit[s].str()}, {"monotone", monotone(s)}});
        }
        return {{"grid", grid}, {"cumulants", rows}};
    }
};

inline KappaConvergence kappa_convergence(unsigned max_s, const std::vector<std::size_t>& grid, unsigned digits = 30) {
    if (grid.empty()) throw std::invalid_argument("kappa_convergence: empty grid");
    KappaConvergence out;
    out.grid = grid;
    const std::size_t n_max = *std::max_element(grid.begin(), grid.end());
    auto seq = bst::path_length_factorial_moment_sequence(n_max, max_s);
    const auto table = cumulants::cumulant_table(std::max(2U, max_s), digits);
    out.normalized.assign(max_s + 1, {});
    out.limit = table.kappa_const;
    for (std::size_t n : grid) {
        auto kappa = factorial_to_cumulants(seq[n].m);
        for (unsigned s = 2; s <= max_s; ++s)
            out.normalized[s].push_back(to_real(kappa[s] / pow(Rational(static_cast<long>(n)), s)));
    }
    return out;
}

}  // namespace treepgf::asymptotics
