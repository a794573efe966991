#pragma once

/**
 * @file montecarlo.hpp
 * @brief Seeded simulation of BST and DST search costs.
 *
 * BST model: keys are a uniformly random permutation of {1, 3, ..., 2n-1}
 * inserted in order; a successful probe is a uniform odd integer in [1, 2n-1],
 * an unsuccessful one a uniform even integer in [0, 2n]. Path length sums
 * (cost - 1) over every odd probe.
 *
 * DST model: rows are inserted in order and routed by successive bits.
 * Infinite keys are bit strings extended 64 bits at a time on demand and
 * compared by identity; finite keys are distinct n-bit rows drawn by
 * rejection, with an unsuccessful probe drawn uniformly from the non-keys.
 *
 * Trials are split into fixed blocks of kBlockTrials; block b draws from a
 * std::mt19937_64 seeded with (seed, b), so results do not depend on how
 * blocks are scheduled across threads.
 */

#include <treepgf/poly.hpp>
#include <treepgf/types.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace treepgf::sim {

inline constexpr std::uint64_t kDefaultSeed = 20200207;
inline constexpr std::uint64_t kBlockTrials = 4096;

enum class Tree { bst, dst };

struct SimConfig {
    Tree tree = Tree::bst;
    std::size_t n = 1;
    std::uint64_t trials = 1;
    std::uint64_t seed = kDefaultSeed;
    Search search = Search::unsuccessful;
    Keys keys = Keys::infinite;  // DST only
    unsigned jobs = 1;
};

struct SimSummary {
    std::uint64_t trials = 0;
    std::vector<std::uint64_t> histogram;  // index = cost
    double mean = 0;
    double variance = 0;  // unbiased sample variance
    double standard_error = 0;

    static SimSummary from_histogram(std::vector<std::uint64_t> hist) {
        SimSummary s;
        s.histogram = std::move(hist);
        s.trials = std::accumulate(s.histogram.begin(), s.histogram.end(), std::uint64_t{0});
        if (s.trials == 0) return s;
        long double sum = 0, sq = 0;
        for (std::size_t k = 0; k < s.histogram.size(); ++k) {
            sum += static_cast<long double>(k) * s.histogram[k];
            sq += static_cast<long double>(k) * k * s.histogram[k];
        }
        const long double t = s.trials;
        const long double mean = sum / t;
        s.mean = static_cast<double>(mean);
        if (s.trials > 1) {
            s.variance = static_cast<double>((sq - t * mean * mean) / (t - 1));
            s.standard_error = std::sqrt(s.variance / static_cast<double>(s.trials));
        }
        return s;
    }

    nlohmann::json to_json() const {
        nlohmann::json h = nlohmann::json::object();
        for (std::size_t k = 0; k < histogram.size(); ++k)
            if (histogram[k] != 0) h[std::to_string(k)] = histogram[k];
        return {{"trials", trials}, {"mean", mean}, {"variance", variance},
                {"standard_error", standard_error}, {"histogram", h}};
    }
};

namespace detail {

inline std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), stream};
    return std::mt19937_64(seq);
}

/// Runs body(rng, hist) for every block; histograms are merged by addition.
template <typename Body>
std::vector<std::uint64_t> run_blocks(std::uint64_t trials, std::uint64_t seed, std::uint32_t stream, unsigned jobs,
                                      std::size_t hist_size, const Body& body) {
    const std::uint64_t blocks = (trials + kBlockTrials - 1) / kBlockTrials;
    jobs = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(jobs, blocks)));
    std::vector<std::vector<std::uint64_t>> hists(jobs, std::vector<std::uint64_t>(hist_size, 0));
    std::vector<std::exception_ptr> errors(jobs);
    std::atomic<std::uint64_t> next{0};
    auto work = [&](unsigned id) {
        try {
            for (std::uint64_t b = next++; b < blocks; b = next++) {
                auto rng = block_rng(seed, b, stream);
                const std::uint64_t count = std::min(kBlockTrials, trials - b * kBlockTrials);
                for (std::uint64_t i = 0; i < count; ++i) body(rng, hists[id]);
            }
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
    std::vector<std::uint64_t> total(hist_size, 0);
    for (const auto& h : hists)
        for (std::size_t i = 0; i < hist_size; ++i) total[i] += h[i];
    return total;
}

/// Comparisons to find (or miss) x among keys inserted in the order of v.
/// Equivalent to recursing on the order-preserving sublists V[V < u] / V[V > u].
inline std::size_t bst_cost(long x, const std::vector<long>& v) {
    long lo = std::numeric_limits<long>::min(), hi = std::numeric_limits<long>::max();
    std::size_t k = 0;
    for (long u : v) {
        if (u <= lo || u >= hi) continue;
        ++k;
        if (x == u) return k;
        if (x < u) hi = u; else lo = u;
    }
    return k;
}

/// Infinite key: bits generated on demand, one 64-bit word at a time.
struct LazyKey {
    std::vector<std::uint64_t> words;
};

template <typename Rng>
bool agree_prefix(LazyKey& a, LazyKey& b, std::size_t d, Rng& rng) {
    if (d == 0) return true;
    const std::size_t words = (d + 63) / 64;
    while (a.words.size() < words) a.words.push_back(rng());
    while (b.words.size() < words) b.words.push_back(rng());
    for (std::size_t w = 0; w + 1 < words; ++w)
        if (a.words[w] != b.words[w]) return false;
    const std::size_t rest = d - 64 * (words - 1);
    const std::uint64_t mask = rest >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << rest) - 1);
    return ((a.words[words - 1] ^ b.words[words - 1]) & mask) == 0;
}

/// Per-thread key storage reused across trials (clear keeps capacity).
inline std::vector<LazyKey>& fresh_keys(std::size_t count) {
    thread_local std::vector<LazyKey> keys;
    if (keys.size() < count) keys.resize(count);
    for (std::size_t i = 0; i < count; ++i) keys[i].words.clear();
    return keys;
}

/// Depth of key t (1 = root): one plus the earlier keys its path meets.
template <typename Rng>
std::size_t dst_depth_infinite(std::vector<LazyKey>& keys, std::size_t t, Rng& rng) {
    std::size_t k = 0;
    for (std::size_t r = 0; r < t; ++r)
        if (agree_prefix(keys[r], keys[t], k, rng)) ++k;
    return k + 1;
}

inline std::uint64_t prefix_mask(std::size_t d) { return d >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << d) - 1); }

inline std::size_t dst_depth_finite(const std::vector<std::uint64_t>& rows, std::size_t t) {
    std::size_t k = 0;
    for (std::size_t r = 0; r < t; ++r)
        if (((rows[r] ^ rows[t]) & prefix_mask(k)) == 0) ++k;
    return k + 1;
}

template <typename Rng>
std::vector<std::uint64_t> distinct_rows(std::size_t count, std::size_t width, Rng& rng) {
    std::uniform_int_distribution<std::uint64_t> draw(0, prefix_mask(width));
    std::vector<std::uint64_t> rows;
    rows.reserve(count);
    while (rows.size() < count) {
        std::uint64_t v = draw(rng);
        if (std::find(rows.begin(), rows.end(), v) == rows.end()) rows.push_back(v);
    }
    return rows;
}

inline std::size_t max_cost(Search s, std::size_t n) { return s == Search::path_length ? n * (n - 1) / 2 : n; }

}  // namespace detail

inline SimSummary simulate_bst(const SimConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("simulate bst: n must be >= 1");
    if (cfg.trials < 1) throw std::invalid_argument("simulate bst: trials must be >= 1");
    const std::size_t n = cfg.n;
    const auto body = [&](std::mt19937_64& rng, std::vector<std::uint64_t>& hist) {
        std::vector<long> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<long>(2 * i + 1);
        std::shuffle(v.begin(), v.end(), rng);
        switch (cfg.search) {
            case Search::unsuccessful: {
                std::uniform_int_distribution<long> pick(0, static_cast<long>(n));
                ++hist[detail::bst_cost(2 * pick(rng), v)];
                break;
            }
            case Search::successful: {
                std::uniform_int_distribution<long> pick(0, static_cast<long>(n) - 1);
                ++hist[detail::bst_cost(2 * pick(rng) + 1, v)];
                break;
            }
            case Search::path_length: {
                std::size_t total = 0;
                for (std::size_t i = 0; i < n; ++i) total += detail::bst_cost(static_cast<long>(2 * i + 1), v) - 1;
                ++hist[total];
                break;
            }
        }
    };
    return SimSummary::from_histogram(
        detail::run_blocks(cfg.trials, cfg.seed, 1, cfg.jobs, detail::max_cost(cfg.search, n) + 1, body));
}

inline SimSummary simulate_dst(const SimConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("simulate dst: n must be >= 1");
    if (cfg.trials < 1) throw std::invalid_argument("simulate dst: trials must be >= 1");
    const std::size_t n = cfg.n;
    if (cfg.keys == Keys::finite && n > 62) throw std::invalid_argument("simulate dst: finite keys need n <= 62");
    const auto body = [&](std::mt19937_64& rng, std::vector<std::uint64_t>& hist) {
        const std::size_t rows_needed = n + (cfg.search == Search::unsuccessful ? 1 : 0);
        std::size_t cost = 0;
        if (cfg.keys == Keys::infinite) {
            auto& keys = detail::fresh_keys(rows_needed);
            switch (cfg.search) {
                case Search::unsuccessful: cost = detail::dst_depth_infinite(keys, n, rng) - 1; break;
                case Search::successful: {
                    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
                    cost = detail::dst_depth_infinite(keys, pick(rng), rng);
                    break;
                }
                case Search::path_length:
                    for (std::size_t t = 0; t < n; ++t) cost += detail::dst_depth_infinite(keys, t, rng) - 1;
                    break;
            }
        } else {
            // Probe last: it must differ from every key, so draw all n+1 distinct.
            auto rows = detail::distinct_rows(rows_needed, n, rng);
            switch (cfg.search) {
                case Search::unsuccessful: cost = detail::dst_depth_finite(rows, n) - 1; break;
                case Search::successful: {
                    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
                    cost = detail::dst_depth_finite(rows, pick(rng));
                    break;
                }
                case Search::path_length:
                    for (std::size_t t = 0; t < n; ++t) cost += detail::dst_depth_finite(rows, t) - 1;
                    break;
            }
        }
        ++hist[cost];
    };
    return SimSummary::from_histogram(
        detail::run_blocks(cfg.trials, cfg.seed, 2, cfg.jobs, detail::max_cost(cfg.search, n) + 1, body));
}

inline SimSummary simulate(const SimConfig& cfg) {
    return cfg.tree == Tree::bst ? simulate_bst(cfg) : simulate_dst(cfg);
}

struct CovarianceEstimate {
    std::size_t n = 0;
    std::uint64_t trials = 0;
    double covariance = 0;  // unbiased sample covariance
    double standard_error = 0;
    double n_times_covariance = 0;
    double n_times_standard_error = 0;
    std::vector<std::uint64_t> joint;  // (n+1) x (n+1) histogram

    nlohmann::json to_json() const {
        return {{"n", n}, {"trials", trials}, {"covariance", covariance}, {"standard_error", standard_error},
                {"n_covariance", n_times_covariance}, {"n_standard_error", n_times_standard_error}};
    }
};

/// Successful costs of two distinct uniformly chosen keys of one infinite-key
/// DST per trial; reports their sample covariance.
inline CovarianceEstimate simulate_dst_cost_covariance(std::size_t n, std::uint64_t trials, std::uint64_t seed,
                                                       unsigned jobs = 1) {
    if (n < 2) throw std::invalid_argument("simulate covariance: n must be >= 2");
    if (trials < 2) throw std::invalid_argument("simulate covariance: covariance needs at least 2 trials");
    const std::size_t side = n + 1;
    const auto body = [&](std::mt19937_64& rng, std::vector<std::uint64_t>& hist) {
        auto& keys = detail::fresh_keys(n);
        std::uniform_int_distribution<std::size_t> first(0, n - 1), second(0, n - 2);
        const std::size_t i = first(rng);
        std::size_t j = second(rng);
        if (j >= i) ++j;
        const std::size_t a = detail::dst_depth_infinite(keys, i, rng);
        const std::size_t b = detail::dst_depth_infinite(keys, j, rng);
        ++hist[a * side + b];
    };
    auto joint = detail::run_blocks(trials, seed, 3, jobs, side * side, body);

    CovarianceEstimate est;
    est.n = n;
    est.trials = trials;
    long double sx = 0, sy = 0;
    for (std::size_t a = 0; a < side; ++a)
        for (std::size_t b = 0; b < side; ++b) {
            const long double c = joint[a * side + b];
            sx += c * a;
            sy += c * b;
        }
    const long double t = trials;
    const long double mx = sx / t, my = sy / t;
    long double cxy = 0, c4 = 0;
    for (std::size_t a = 0; a < side; ++a)
        for (std::size_t b = 0; b < side; ++b) {
            const long double c = joint[a * side + b];
            if (c == 0) continue;
            const long double p = (a - mx) * (b - my);
            cxy += c * p;
            c4 += c * p * p;
        }
    const long double cov = cxy / (t - 1);
    const long double var_prod = c4 / t - (cxy / t) * (cxy / t);
    est.covariance = static_cast<double>(cov);
    est.standard_error = static_cast<double>(std::sqrt(std::max<long double>(var_prod, 0) / t));
    est.n_times_covariance = static_cast<double>(n) * est.covariance;
    est.n_times_standard_error = static_cast<double>(n) * est.standard_error;
    est.joint = std::move(joint);
    return est;
}

struct ChiSquareResult {
    double statistic = 0;
    std::size_t dof = 0;
    double p_value = 1;
    bool support_ok = true;  // no observations outside the PGF's support

    nlohmann::json to_json() const {
        return {{"statistic", statistic}, {"dof", dof}, {"p_value", p_value}, {"support_ok", support_ok}};
    }
};

/// Pearson goodness of fit of a cost histogram against an exact PGF. Cells with
/// expected count below 5 are pooled with their neighbour toward the mode.
inline ChiSquareResult chi_square_test(const std::vector<std::uint64_t>& hist, const Poly& pgf) {
    ChiSquareResult res;
    const std::uint64_t trials = std::accumulate(hist.begin(), hist.end(), std::uint64_t{0});
    struct Cell {
        double expected;
        double observed;
    };
    std::vector<Cell> cells;
    const std::size_t top = std::max(hist.size(), pgf.coeffs().size());
    for (std::size_t k = 0; k < top; ++k) {
        const double p = pgf[k].to_double();
        const double o = k < hist.size() ? static_cast<double>(hist[k]) : 0.0;
        if (p == 0) {
            if (o != 0) res.support_ok = false;
            continue;
        }
        cells.push_back({p * static_cast<double>(trials), o});
    }
    if (!res.support_ok) {
        res.p_value = 0;
        return res;
    }
    // pool small cells from both ends inward
    while (cells.size() > 1 && cells.front().expected < 5) {
        cells[1].expected += cells[0].expected;
        cells[1].observed += cells[0].observed;
        cells.erase(cells.begin());
    }
    while (cells.size() > 1 && cells.back().expected < 5) {
        cells[cells.size() - 2].expected += cells.back().expected;
        cells[cells.size() - 2].observed += cells.back().observed;
        cells.pop_back();
    }
    if (cells.size() <= 1) return res;
    for (const auto& c : cells) res.statistic += (c.observed - c.expected) * (c.observed - c.expected) / c.expected;
    res.dof = cells.size() - 1;
    boost::math::chi_squared_distribution<double> dist(static_cast<double>(res.dof));
    res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
    return res;
}

}  // namespace treepgf::sim
