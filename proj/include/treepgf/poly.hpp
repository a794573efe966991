#pragma once

/**
 * @file poly.hpp
 * @brief Dense univariate polynomials over Rational.
 *
 * Used as probability generating functions: coefficient k is P{cost = k}.
 * Storage is dense; every PGF in this library has contiguous support, so
 * gaps are rare and cheap.
 */

#include <treepgf/rational.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace treepgf {

class Poly {
public:
    Poly() = default;
    Poly(std::initializer_list<Rational> cs) : c_(cs) { normalize(); }
    explicit Poly(std::vector<Rational> cs) : c_(std::move(cs)) { normalize(); }

    static Poly constant(const Rational& c) { return Poly(std::vector<Rational>{c}); }

    /// c z^k
    static Poly monomial(std::size_t k, const Rational& c = 1) {
        std::vector<Rational> cs(k + 1);
        cs[k] = c;
        return Poly(std::move(cs));
    }

    bool is_zero() const { return c_.empty(); }

    /// Degree; the zero polynomial reports 0.
    std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }

    /// Lowest exponent with a nonzero coefficient (0 for the zero polynomial).
    std::size_t min_degree() const {
        for (std::size_t k = 0; k < c_.size(); ++k)
            if (!c_[k].is_zero()) return k;
        return 0;
    }

    Rational operator[](std::size_t k) const { return k < c_.size() ? c_[k] : Rational{}; }
    const std::vector<Rational>& coeffs() const { return c_; }

    Rational eval(const Rational& z) const {
        Rational acc;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    /// Sum of coefficients, i.e. value at z = 1.
    Rational sum() const {
        Rational s;
        for (const auto& c : c_) s += c;
        return s;
    }

    Poly& operator+=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        normalize();
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
        normalize();
        return *this;
    }
    Poly& operator*=(const Rational& s) {
        if (s.is_zero()) { c_.clear(); return *this; }
        for (auto& c : c_) c *= s;
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
    friend Poly operator*(const Rational& s, Poly a) { return a *= s; }
    friend Poly operator*(const Poly& a, const Poly& b);

    /// Multiply by z^k.
    Poly shifted(std::size_t k) const {
        if (is_zero()) return {};
        std::vector<Rational> cs(k);
        cs.insert(cs.end(), c_.begin(), c_.end());
        return Poly(std::move(cs));
    }

    friend bool operator==(const Poly&, const Poly&) = default;

    /// Coefficient strings in ascending degree, e.g. ["0","1/3","2/3"].
    nlohmann::json to_json() const {
        auto arr = nlohmann::json::array();
        for (const auto& c : c_) arr.push_back(c.str());
        if (c_.empty()) arr.push_back("0");
        return arr;
    }

    static Poly from_json(const nlohmann::json& j) {
        if (!j.is_array()) throw std::invalid_argument("Poly: expected a JSON array");
        std::vector<Rational> cs;
        for (const auto& e : j) cs.push_back(Rational::parse(e.get<std::string>()));
        return Poly(std::move(cs));
    }

    std::string str() const {
        if (is_zero()) return "0";
        std::string out;
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (c_[k].is_zero()) continue;
            if (!out.empty()) out += " + ";
            out += "(" + c_[k].str() + ")";
            if (k == 1) out += "z";
            if (k > 1) out += "z^" + std::to_string(k);
        }
        return out;
    }

private:
    void normalize() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    std::vector<Rational> c_;
};

inline Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    }
    return Poly(std::move(out));
}

using Pgf = Poly;

inline Poly poly_mul(const Poly& a, const Poly& b) { return a * b; }

/// Formal derivative of the given order (order >= 1).
inline Poly poly_derivative(const Poly& p, unsigned order = 1) {
    if (order == 0) throw std::invalid_argument("poly_derivative: order must be >= 1");
    const auto& c = p.coeffs();
    if (c.size() <= order) return {};
    std::vector<Rational> out(c.size() - order);
    for (std::size_t k = order; k < c.size(); ++k) out[k - order] = c[k] * Rational(falling_factorial(k, order));
    return Poly(std::move(out));
}

/// p^{(r)}(1) without forming the derivative polynomial; order 0 gives p(1).
inline Rational derivative_at_one(const Poly& p, unsigned order) {
    Rational acc;
    const auto& c = p.coeffs();
    for (std::size_t k = order; k < c.size(); ++k) {
        if (c[k].is_zero()) continue;
        acc += c[k] * Rational(falling_factorial(k, order));
    }
    return acc;
}

/// Mean of the distribution encoded by p.
inline Rational pgf_mean(const Poly& p) { return derivative_at_one(p, 1); }

/// Variance h - g^2 + g from the first two factorial moments.
inline Rational pgf_variance(const Poly& p) {
    auto g = derivative_at_one(p, 1);
    auto h = derivative_at_one(p, 2);
    return h - g * g + g;
}

/// True iff all coefficients are nonnegative and they sum to exactly one.
inline bool is_probability_pgf(const Poly& p) {
    return std::all_of(p.coeffs().begin(), p.coeffs().end(), [](const Rational& c) { return c.sign() >= 0; })
        && p.sum() == Rational(1);
}

}  // namespace treepgf
