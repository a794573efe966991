#pragma once

/**
 * @file types.hpp
 * @brief Cost-family selectors shared across modules.
 */

#include <stdexcept>
#include <string>
#include <string_view>

namespace treepgf {

enum class Search { unsuccessful, successful, path_length };

/// Infinite keys: bit strings of unbounded length, almost surely distinct.
/// Finite keys: n-bit strings for an n-key tree, distinctness enforced.
enum class Keys { infinite, finite };

inline std::string to_string(Search s) {
    switch (s) {
        case Search::unsuccessful: return "unsuccessful";
        case Search::successful: return "successful";
        case Search::path_length: return "pathlength";
    }
    return "?";
}

inline std::string to_string(Keys k) { return k == Keys::infinite ? "infinite" : "finite"; }

inline Search parse_search(std::string_view s) {
    if (s == "unsuccessful") return Search::unsuccessful;
    if (s == "successful") return Search::successful;
    if (s == "pathlength" || s == "path_length" || s == "path-length") return Search::path_length;
    throw std::invalid_argument("unknown search family '" + std::string(s) + "' (expected unsuccessful|successful|pathlength)");
}

inline Keys parse_keys(std::string_view s) {
    if (s == "infinite") return Keys::infinite;
    if (s == "finite") return Keys::finite;
    throw std::invalid_argument("unknown key model '" + std::string(s) + "' (expected infinite|finite)");
}

}  // namespace treepgf
