#pragma once

/**
 * @file verify.hpp
 * @brief Cross-oracle consistency suite: recursions, reference tables and
 *        exhaustive enumeration checked against each other.
 *
 * Tiers: fast (enumerations up to n = 4), standard (adds n = 5 except
 * finite-key unsuccessful search), full (everything).
 */

#include <treepgf/bst.hpp>
#include <treepgf/dst.hpp>
#include <treepgf/dst_enum.hpp>
#include <treepgf/poly.hpp>
#include <treepgf/types.hpp>

#include <nlohmann/json.hpp>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace treepgf::verify {

enum class Tier { fast, standard, full };

inline std::string to_string(Tier t) {
    switch (t) {
        case Tier::fast: return "fast";
        case Tier::standard: return "standard";
        case Tier::full: return "full";
    }
    return "?";
}

struct Check {
    std::string name;
    bool ok = false;
    std::string detail;  // exception text when the check could not run
};

struct Report {
    Tier tier = Tier::fast;
    std::vector<Check> checks;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.ok) return false;
        return true;
    }

    nlohmann::json to_json() const {
        auto arr = nlohmann::json::array();
        for (const auto& c : checks) {
            nlohmann::json j = {{"name", c.name}, {"ok", c.ok}};
            if (!c.detail.empty()) j["detail"] = c.detail;
            arr.push_back(std::move(j));
        }
        return {{"tier", to_string(tier)}, {"checks", arr}, {"all_passed", all_passed()}};
    }
};

namespace detail {

inline void add(Report& r, std::string name, const std::function<bool()>& body) {
    Check c{std::move(name), false, {}};
    try {
        c.ok = body();
    } catch (const std::exception& e) {
        c.detail = e.what();
    }
    r.checks.push_back(std::move(c));
}

inline std::string label(const char* what, Search s, Keys k, std::size_t n) {
    return std::string(what) + " " + to_string(s) + " " + to_string(k) + " n=" + std::to_string(n);
}

/// Recursion-derived PGF when one exists.
inline Poly recursion_pgf(Search s, std::size_t n) {
    switch (s) {
        case Search::unsuccessful: return dst::unsuccessful_pgf_infinite(n);
        case Search::successful: return dst::successful_pgf_infinite(n);
        case Search::path_length: return dst::path_length_pgf(n);
    }
    throw std::invalid_argument("recursion_pgf: unknown search");
}

}  // namespace detail

inline Report run(Tier tier, unsigned jobs = 1) {
    Report r;
    r.tier = tier;
    const dst::EnumOptions opt{0, jobs, false};

    for (std::size_t n = 1; n <= 12; ++n) {
        detail::add(r, "bst moments match pgf n=" + std::to_string(n), [n] {
            const auto u = bst::unsuccessful_pgf(n);
            const auto s = bst::successful_pgf(n);
            const auto l = bst::path_length_pgf(n);
            const auto mu = bst::unsuccessful_moments(n);
            const auto ms = bst::successful_moments(n);
            const auto ml = bst::path_length_moments(n);
            return derivative_at_one(u, 1) == mu.g && derivative_at_one(u, 2) == mu.h
                && derivative_at_one(s, 1) == ms.g && derivative_at_one(s, 2) == ms.h
                && derivative_at_one(l, 1) == ml.g && derivative_at_one(l, 2) == ml.h;
        });
    }

    for (std::size_t n = 2; n <= 5; ++n)
        for (Search s : {Search::unsuccessful, Search::successful})
            detail::add(r, detail::label("recursion vs table", s, Keys::infinite, n),
                        [=] { return detail::recursion_pgf(s, n) == dst::golden_table(s, Keys::infinite, n); });

    const std::size_t top = tier == Tier::fast ? 4 : 5;
    for (std::size_t n = 2; n <= top; ++n) {
        for (Search s : {Search::unsuccessful, Search::successful, Search::path_length}) {
            detail::add(r, detail::label("enumeration vs recursion", s, Keys::infinite, n),
                        [=] { return dst::enumerate(n, s, Keys::infinite, opt).pgf == detail::recursion_pgf(s, n); });
            if (s == Search::unsuccessful && n == 5 && tier != Tier::full) continue;
            detail::add(r, detail::label("enumeration vs table", s, Keys::finite, n),
                        [=] { return dst::enumerate(n, s, Keys::finite, opt).pgf == dst::golden_table(s, Keys::finite, n); });
        }
    }

    const std::size_t wide_top = tier == Tier::fast ? 3 : 4;
    for (std::size_t n = 1; n <= wide_top; ++n)
        for (Search s : {Search::unsuccessful, Search::successful})
            detail::add(r, detail::label("width n vs n+1", s, Keys::infinite, n),
                        [=] { return dst::width_stability_check(n, s, jobs); });
    return r;
}

}  // namespace treepgf::verify
