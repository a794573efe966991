#pragma once

/**
 * @file dst_enum.hpp
 * @brief Exhaustive-enumeration oracle for digital search tree costs.
 *
 * A search runs over an ordered list of keys: the first key is the root, the
 * keys after it that agree with the probe on bit 1 form the subtree the probe
 * descends into, and so on bit by bit. Keys are w-bit rows; bit p (1-based) of
 * a row is bit p-1 of its integer value.
 *
 * With infinite keys, equality is identity (each row carries a tag), so rows
 * that happen to share their first w bits are still different keys. With
 * finite keys, rows are n-bit vectors that must be pairwise distinct and
 * equality is bit equality.
 *
 * enumerate() walks every matrix (rows in insertion order, plus the probe for
 * unsuccessful search) and counts costs exactly. The walk is incremental:
 * each level adds one row and updates the running comparison count, and the
 * innermost unsuccessful level is counted in bulk from popcounts.
 */

#include <treepgf/poly.hpp>
#include <treepgf/rational.hpp>
#include <treepgf/types.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace treepgf::dst {

/// A search needed a routing bit beyond the matrix width.
class width_exhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class infeasible_enumeration : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Key {
    std::uint64_t bits = 0;
    std::size_t tag = 0;

    bool bit(unsigned p) const { return ((bits >> (p - 1)) & 1U) != 0; }
};

struct BitMatrix {
    unsigned width = 1;
    Keys keys = Keys::infinite;
    std::vector<Key> rows;
    Key probe;

    /// Checks width bounds, tag uniqueness (infinite) or row distinctness (finite).
    void validate() const {
        if (width < 1 || width > 64) throw std::invalid_argument("BitMatrix: width must be in 1..64");
        const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
        auto in_range = [&](const Key& k) { return (k.bits & ~mask) == 0; };
        if (!in_range(probe)) throw std::invalid_argument("BitMatrix: probe wider than width");
        for (const auto& r : rows)
            if (!in_range(r)) throw std::invalid_argument("BitMatrix: row wider than width");
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = i + 1; j < rows.size(); ++j) {
                if (keys == Keys::infinite && rows[i].tag == rows[j].tag)
                    throw std::invalid_argument("BitMatrix: duplicate identity tag");
                if (keys == Keys::finite && rows[i].bits == rows[j].bits)
                    throw std::invalid_argument("BitMatrix: finite keys must be distinct");
            }
    }

    bool matches(const Key& a, const Key& b) const {
        return keys == Keys::infinite ? a.tag == b.tag : a.bits == b.bits;
    }
};

/// Comparison count for searching m.probe, following the recursive
/// filter-by-bit procedure literally. Throws width_exhausted if routing
/// needs bit p > width while keys remain.
inline std::size_t dst_search_cost(const BitMatrix& m) {
    std::vector<Key> live = m.rows;
    std::size_t k = 0;
    unsigned p = 1;
    while (!live.empty()) {
        ++k;
        if (m.matches(m.probe, live.front())) return k;
        live.erase(live.begin());
        if (live.empty()) break;
        if (p > m.width)
            throw width_exhausted("dst_search_cost: routing needs bit " + std::to_string(p) + " but width is "
                                  + std::to_string(m.width));
        const bool want = m.probe.bit(p);
        std::erase_if(live, [&](const Key& r) { return r.bit(p) != want; });
        ++p;
    }
    return k;
}

struct EnumOptions {
    unsigned width = 0;  // 0 selects width n
    unsigned jobs = 1;
    bool use_symmetry = false;  // halve work via global bit complement
};

struct EnumResult {
    std::size_t n = 0;
    Search search = Search::unsuccessful;
    Keys keys = Keys::infinite;
    unsigned width = 0;
    std::map<std::size_t, BigInt> counts;  // cost -> number of cases
    BigInt total = 0;
    Poly pgf;

    nlohmann::json to_json() const {
        nlohmann::json c = nlohmann::json::object();
        for (const auto& [cost, cnt] : counts) c[std::to_string(cost)] = cnt.get_str();
        return {{"n", n}, {"search", to_string(search)}, {"keys", to_string(keys)}, {"width", width},
                {"counts", c}, {"total", total.get_str()}, {"pgf", pgf.to_json()}};
    }
};

/// Joint distribution of the successful costs of two distinct keys in the
/// same tree, over all matrices and all ordered key pairs.
struct JointEnumResult {
    std::size_t n = 0;
    Keys keys = Keys::infinite;
    std::map<std::pair<std::size_t, std::size_t>, BigInt> counts;
    BigInt total = 0;

    Rational covariance() const {
        Rational ex, ey, exy;
        for (const auto& [c, cnt] : counts) {
            Rational p(cnt, total);
            ex += p * Rational(static_cast<long>(c.first));
            ey += p * Rational(static_cast<long>(c.second));
            exy += p * Rational(static_cast<long>(c.first * c.second));
        }
        return exy - ex * ey;
    }
};

/// Number of matrices (times probe/target choices) the enumeration covers.
inline BigInt enumeration_case_count(std::size_t n, Search search, Keys keys, unsigned width) {
    const unsigned long rows = n + (search == Search::unsuccessful ? 1 : 0);
    BigInt matrices;
    if (keys == Keys::infinite) {
        mpz_ui_pow_ui(matrices.get_mpz_t(), 2, static_cast<unsigned long>(width) * rows);
    } else {
        matrices = falling_factorial(1UL << width, rows);
    }
    if (search == Search::successful) matrices *= static_cast<unsigned long>(n);
    return matrices;
}

namespace detail {

struct Tally {
    std::vector<std::uint64_t> by_cost;
    std::vector<std::uint64_t> joint;  // (n+1) x (n+1), successful pairs

    void merge_into(std::vector<BigInt>& cost, std::vector<BigInt>& pair) const {
        for (std::size_t i = 0; i < by_cost.size(); ++i) cost[i] += static_cast<unsigned long>(by_cost[i]);
        for (std::size_t i = 0; i < joint.size(); ++i) pair[i] += static_cast<unsigned long>(joint[i]);
    }
};

class Walker {
public:
    Walker(unsigned n, unsigned width, Search search, Keys keys, bool joint)
        : n_(n), w_(width), search_(search), keys_(keys), joint_(joint), values_(1U << width) {
        if (keys_ == Keys::finite) {
            agree_.assign(values_, std::vector<std::uint64_t>(w_ + 1, 0));
            for (unsigned x = 0; x < values_; ++x)
                for (unsigned k = 0; k <= w_; ++k)
                    for (unsigned v = 0; v < values_; ++v)
                        if (((v ^ x) & prefix_mask(k)) == 0) agree_[x][k] |= std::uint64_t{1} << v;
        }
        full_ = values_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << values_) - 1);
    }

    Tally make_tally() const {
        Tally t;
        std::size_t max_cost = search_ == Search::path_length ? n_ * (n_ - 1) / 2 : n_;
        t.by_cost.assign(max_cost + 1, 0);
        if (joint_) t.joint.assign((n_ + 1) * (n_ + 1), 0);
        return t;
    }

    /// All cases whose first enumerated value (probe, or first row) is v0.
    void run_from(unsigned v0, Tally& out) {
        const std::uint64_t used = std::uint64_t{1} << v0;
        if (search_ == Search::unsuccessful) {
            probe_ = v0;
            unsuccessful_level(0, 0, keys_ == Keys::finite ? used : 0, out);
        } else {
            rows_[0] = v0;
            depth_[0] = 1;
            rows_level(1, used, out);
        }
    }

    unsigned values() const { return values_; }

private:
    static std::uint32_t prefix_mask(unsigned k) { return k >= 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << k) - 1); }

    void check_width(unsigned d) const {
        if (d > w_)
            throw width_exhausted("dst enumerate: routing needs bit " + std::to_string(d) + " but width is "
                                  + std::to_string(w_));
    }

    // `placed` rows are in; k comparisons so far, which equals the number of
    // bits consumed by the probe's path.
    void unsuccessful_level(unsigned placed, unsigned k, std::uint64_t used, Tally& out) {
        check_width(k);
        if (placed + 1 == n_) {
            if (keys_ == Keys::infinite) {
                const std::uint64_t agree = std::uint64_t{1} << (w_ - k);
                out.by_cost[k + 1] += agree;
                out.by_cost[k] += values_ - agree;
            } else {
                const std::uint64_t free = full_ & ~used;
                const std::uint64_t agree = agree_[probe_][k] & free;
                out.by_cost[k + 1] += static_cast<std::uint64_t>(std::popcount(agree));
                out.by_cost[k] += static_cast<std::uint64_t>(std::popcount(free & ~agree));
            }
            return;
        }
        const std::uint32_t mask = prefix_mask(k);
        for (unsigned v = 0; v < values_; ++v) {
            if (keys_ == Keys::finite && ((used >> v) & 1U)) continue;
            const unsigned step = ((v ^ probe_) & mask) == 0 ? 1 : 0;
            unsuccessful_level(placed + 1, k + step, keys_ == Keys::finite ? (used | (std::uint64_t{1} << v)) : 0, out);
        }
    }

    void rows_level(unsigned placed, std::uint64_t used, Tally& out) {
        if (placed == n_) {
            leaf(out);
            return;
        }
        for (unsigned v = 0; v < values_; ++v) {
            if (keys_ == Keys::finite && ((used >> v) & 1U)) continue;
            unsigned k = 0;
            for (unsigned r = 0; r < placed; ++r) {
                check_width(k);
                if (((rows_[r] ^ v) & prefix_mask(k)) == 0) ++k;
            }
            rows_[placed] = v;
            depth_[placed] = k + 1;
            rows_level(placed + 1, used | (std::uint64_t{1} << v), out);
        }
    }

    void leaf(Tally& out) const {
        if (search_ == Search::path_length) {
            std::size_t total = 0;
            for (unsigned t = 0; t < n_; ++t) total += depth_[t] - 1;
            ++out.by_cost[total];
            return;
        }
        for (unsigned t = 0; t < n_; ++t) ++out.by_cost[depth_[t]];
        if (joint_)
            for (unsigned s = 0; s < n_; ++s)
                for (unsigned t = 0; t < n_; ++t)
                    if (s != t) ++out.joint[depth_[s] * (n_ + 1) + depth_[t]];
    }

    unsigned n_;
    unsigned w_;
    Search search_;
    Keys keys_;
    bool joint_;
    unsigned values_;
    std::uint64_t full_ = 0;
    std::vector<std::vector<std::uint64_t>> agree_;  // finite keys: values agreeing with x on k bits
    unsigned probe_ = 0;
    std::uint32_t rows_[8] = {};
    unsigned depth_[8] = {};
};

struct RawCounts {
    std::vector<BigInt> by_cost;
    std::vector<BigInt> joint;
};

inline void check_feasible(std::size_t n, Search search, Keys keys, unsigned width) {
    auto cases = [&] { return enumeration_case_count(n, search, keys, width).get_str(); };
    if (n < 1) throw infeasible_enumeration("dst enumerate: n must be >= 1");
    if (keys == Keys::finite && width != n)
        throw infeasible_enumeration("dst enumerate: finite keys require width == n");
    if (width < n) throw infeasible_enumeration("dst enumerate: width must be >= n");
    if (n > 5 || width > 6 || (width > n && n > 4))
        throw infeasible_enumeration("dst enumerate: n=" + std::to_string(n) + ", width=" + std::to_string(width)
                                     + " is infeasible (" + cases() + " cases); supported: n <= 5 at width n, n <= 4 at width n+1");
}

inline RawCounts run_enumeration(std::size_t n, Search search, Keys keys, const EnumOptions& opt, bool joint) {
    const unsigned width = opt.width == 0 ? static_cast<unsigned>(n) : opt.width;
    check_feasible(n, search, keys, width);

    Walker proto(static_cast<unsigned>(n), width, search, keys, joint);
    std::vector<unsigned> firsts;
    for (unsigned v = 0; v < proto.values(); ++v)
        if (!opt.use_symmetry || (v & 1U) == 0) firsts.push_back(v);

    const unsigned jobs = std::max(1U, std::min<unsigned>(opt.jobs, static_cast<unsigned>(firsts.size())));
    std::vector<Tally> tallies(jobs, proto.make_tally());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs);
    auto work = [&](unsigned id) {
        try {
            Walker walker = proto;
            for (std::size_t i = next++; i < firsts.size(); i = next++) walker.run_from(firsts[i], tallies[id]);
        } catch (...) {
            errors[id] = std::current_exception();
        }
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned id = 0; id < jobs; ++id) pool.emplace_back(work, id);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    RawCounts raw{std::vector<BigInt>(tallies[0].by_cost.size(), 0), std::vector<BigInt>(tallies[0].joint.size(), 0)};
    for (const auto& t : tallies) t.merge_into(raw.by_cost, raw.joint);
    if (opt.use_symmetry) {
        for (auto& c : raw.by_cost) c *= 2;
        for (auto& c : raw.joint) c *= 2;
    }
    return raw;
}

}  // namespace detail

/// Exact cost distribution by exhaustive enumeration, n in 1..5.
inline EnumResult enumerate(std::size_t n, Search search, Keys keys, const EnumOptions& opt = {}) {
    const unsigned width = opt.width == 0 ? static_cast<unsigned>(n) : opt.width;
    auto raw = detail::run_enumeration(n, search, keys, opt, false);

    EnumResult res;
    res.n = n;
    res.search = search;
    res.keys = keys;
    res.width = width;
    for (std::size_t c = 0; c < raw.by_cost.size(); ++c) {
        if (raw.by_cost[c] == 0) continue;
        res.counts[c] = raw.by_cost[c];
        res.total += raw.by_cost[c];
    }
    if (res.total != enumeration_case_count(n, search, keys, width))
        throw std::logic_error("dst enumerate: case total does not match the matrix count");
    std::vector<Rational> coeffs(raw.by_cost.size());
    for (const auto& [c, cnt] : res.counts) coeffs[c] = Rational(cnt, res.total);
    res.pgf = Poly(std::move(coeffs));
    return res;
}

inline EnumResult enumerate_path_length(std::size_t n, Keys keys, const EnumOptions& opt = {}) {
    return enumerate(n, Search::path_length, keys, opt);
}

inline JointEnumResult enumerate_successful_pairs(std::size_t n, Keys keys, const EnumOptions& opt = {}) {
    if (n < 2) throw std::invalid_argument("enumerate_successful_pairs: n must be >= 2");
    auto raw = detail::run_enumeration(n, Search::successful, keys, opt, true);
    JointEnumResult res;
    res.n = n;
    res.keys = keys;
    for (std::size_t a = 0; a <= n; ++a)
        for (std::size_t b = 0; b <= n; ++b) {
            const auto& c = raw.joint[a * (n + 1) + b];
            if (c == 0) continue;
            res.counts[{a, b}] = c;
            res.total += c;
        }
    return res;
}

/// Infinite-key PGF is unchanged when the width grows from n to n+1 (n <= 4).
inline bool width_stability_check(std::size_t n, Search search, unsigned jobs = 1) {
    if (n > 4) throw infeasible_enumeration("width_stability_check: n must be <= 4");
    EnumOptions narrow{static_cast<unsigned>(n), jobs, false};
    EnumOptions wide{static_cast<unsigned>(n + 1), jobs, false};
    return enumerate(n, search, Keys::infinite, narrow).pgf == enumerate(n, search, Keys::infinite, wide).pgf;
}

/// Uniformly random matrix for tests and spot checks: distinct rows for
/// finite keys; the probe is a fresh key (unsuccessful) or one of the rows.
template <typename Rng>
BitMatrix random_bit_matrix(std::size_t n, unsigned width, Keys keys, bool successful, Rng& rng) {
    BitMatrix m;
    m.width = width;
    m.keys = keys;
    const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
    std::uniform_int_distribution<std::uint64_t> bits(0, mask);
    auto fresh = [&](std::size_t tag) {
        for (;;) {
            Key k{bits(rng), tag};
            if (keys == Keys::infinite) return k;
            bool clash = std::any_of(m.rows.begin(), m.rows.end(), [&](const Key& r) { return r.bits == k.bits; });
            if (!clash) return k;
        }
    };
    for (std::size_t i = 0; i < n; ++i) m.rows.push_back(fresh(i));
    if (successful) {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        m.probe = m.rows[pick(rng)];
    } else {
        m.probe = fresh(n);
    }
    return m;
}

}  // namespace treepgf::dst
