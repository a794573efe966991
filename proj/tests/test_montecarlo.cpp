#include <treepgf/bst.hpp>
#include <treepgf/dst.hpp>
#include <treepgf/dst_enum.hpp>
#include <treepgf/montecarlo.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace treepgf;

namespace {

/// The recursive search exactly as written: compare with the first key, then
/// recurse on the keys below (or above) it, kept in insertion order.
std::size_t recursive_bst_cost(long x, std::vector<long> v, std::size_t k = 0) {
    if (v.empty()) return k;
    const long u = v.front();
    if (x == u) return k + 1;
    std::vector<long> next;
    for (long w : v)
        if (x < u ? w < u : w > u) next.push_back(w);
    return recursive_bst_cost(x, std::move(next), k + 1);
}

sim::SimConfig config(sim::Tree tree, std::size_t n, std::uint64_t trials, Search s, Keys k = Keys::infinite) {
    sim::SimConfig c;
    c.tree = tree;
    c.n = n;
    c.trials = trials;
    c.search = s;
    c.keys = k;
    return c;
}

/// |p_hat - p| within 4 binomial standard errors.
void expect_proportion(std::uint64_t hits, std::uint64_t trials, double p) {
    const double p_hat = static_cast<double>(hits) / static_cast<double>(trials);
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(trials));
    EXPECT_LE(std::abs(p_hat - p), 4 * sigma) << "p_hat=" << p_hat << " p=" << p;
}

}  // namespace

TEST(BstSimulation, IntervalScanMatchesRecursiveSearch) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 3000; ++t) {
        const std::size_t n = 1 + t % 12;
        std::vector<long> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<long>(2 * i + 1);
        std::shuffle(v.begin(), v.end(), rng);
        for (long x = 0; x <= static_cast<long>(2 * n); ++x) EXPECT_EQ(sim::detail::bst_cost(x, v), recursive_bst_cost(x, v));
    }
}

TEST(BstSimulation, SingleKeyAlwaysCostsOne) {
    auto s = sim::simulate_bst(config(sim::Tree::bst, 1, 5000, Search::unsuccessful));
    EXPECT_EQ(s.histogram[1], 5000U);
    EXPECT_EQ(s.mean, 1.0);
    EXPECT_EQ(s.variance, 0.0);
}

TEST(BstSimulation, SummaryIsConsistentWithHistogram) {
    auto s = sim::simulate_bst(config(sim::Tree::bst, 6, 20000, Search::path_length));
    EXPECT_EQ(std::accumulate(s.histogram.begin(), s.histogram.end(), std::uint64_t{0}), s.trials);
    double sum = 0;
    for (std::size_t k = 0; k < s.histogram.size(); ++k) sum += static_cast<double>(k * s.histogram[k]);
    EXPECT_NEAR(s.mean, sum / 20000, 1e-9);
    // support of L_6 is {min path length, ..., 15}
    for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(s.histogram[k], 0U) << k;
    EXPECT_EQ(s.histogram.size(), 16U);
}

TEST(BstSimulation, DeterministicAcrossThreadCounts) {
    auto c = config(sim::Tree::bst, 9, 50000, Search::successful);
    auto a = sim::simulate(c);
    c.jobs = 4;
    auto b = sim::simulate(c);
    EXPECT_EQ(a.histogram, b.histogram);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.variance, b.variance);
    c.seed += 1;
    EXPECT_NE(sim::simulate(c).histogram, a.histogram);
}

TEST(BstSimulation, LargeTreeMeanWithinFourStandardErrors) {
    auto c = config(sim::Tree::bst, 100, 1000000, Search::unsuccessful);
    auto s = sim::simulate(c);
    const double exact = bst::unsuccessful_moments(100).g.to_double();
    EXPECT_LE(std::abs(s.mean - exact), 4 * s.standard_error);
}

TEST(BstSimulation, SuccessfulHistogramMatchesPgf) {
    auto s = sim::simulate(config(sim::Tree::bst, 3, 1000000, Search::successful));
    auto p = bst::successful_pgf(3);
    for (std::size_t k = 1; k <= 3; ++k) expect_proportion(s.histogram[k], s.trials, p[k].to_double());
}

TEST(DstSimulation, FiniteScanMatchesLiteralSearch) {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 3000; ++t) {
        const std::size_t n = 1 + t % 6;
        auto rows = sim::detail::distinct_rows(n + 1, n, rng);
        dst::BitMatrix m;
        m.width = static_cast<unsigned>(n);
        m.keys = Keys::finite;
        for (std::size_t i = 0; i < n; ++i) m.rows.push_back({rows[i], i});
        m.probe = {rows[n], n};
        EXPECT_EQ(sim::detail::dst_depth_finite(rows, n) - 1, dst::dst_search_cost(m));
        for (std::size_t i = 0; i < n; ++i) {
            m.probe = m.rows[i];
            EXPECT_EQ(sim::detail::dst_depth_finite(rows, i), dst::dst_search_cost(m));
        }
    }
}

TEST(DstSimulation, LazyKeysMatchLiteralSearch) {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 3000; ++t) {
        const std::size_t n = 1 + t % 10;
        std::vector<sim::detail::LazyKey> keys(n + 1);
        dst::BitMatrix m;
        m.width = 64;
        m.keys = Keys::infinite;
        for (std::size_t i = 0; i <= n; ++i) {
            // narrow random words so that long shared prefixes occur
            keys[i].words.push_back(rng() & (t % 2 ? 0x3U : ~std::uint64_t{0}));
            if (i < n) m.rows.push_back({keys[i].words[0], i});
        }
        m.probe = {keys[n].words[0], n};
        std::mt19937_64 unused(0);
        try {
            const auto expected = dst::dst_search_cost(m);
            EXPECT_EQ(sim::detail::dst_depth_infinite(keys, n, unused) - 1, expected);
        } catch (const dst::width_exhausted&) {
            // prefixes longer than one word; the lazy scan would draw more bits
        }
    }
}

TEST(DstSimulation, SingleKeyAlwaysCostsOne) {
    for (Keys k : {Keys::infinite, Keys::finite})
        for (Search s : {Search::unsuccessful, Search::successful}) {
            auto r = sim::simulate_dst(config(sim::Tree::dst, 1, 3000, s, k));
            EXPECT_EQ(r.histogram[1], 3000U);
        }
}

TEST(DstSimulation, TwoKeyInfiniteUnsuccessful) {
    auto s = sim::simulate(config(sim::Tree::dst, 2, 1000000, Search::unsuccessful, Keys::infinite));
    expect_proportion(s.histogram[1], s.trials, 0.5);
}

TEST(DstSimulation, FiveKeyFiniteWorstCase) {
    auto s = sim::simulate(config(sim::Tree::dst, 5, 1000000, Search::unsuccessful, Keys::finite));
    expect_proportion(s.histogram[5], s.trials, 1.0 / 6293);
}

TEST(DstSimulation, DeterministicAcrossThreadCounts) {
    auto c = config(sim::Tree::dst, 7, 30000, Search::path_length, Keys::infinite);
    auto a = sim::simulate(c);
    c.jobs = 3;
    EXPECT_EQ(sim::simulate(c).histogram, a.histogram);
}

TEST(Simulation, ChiSquareAgainstExactPgfs) {
    for (std::size_t n = 2; n <= 5; ++n)
        for (Search s : {Search::unsuccessful, Search::successful, Search::path_length}) {
            Poly bp = s == Search::unsuccessful ? bst::unsuccessful_pgf(n)
                    : s == Search::successful   ? bst::successful_pgf(n)
                                                : bst::path_length_pgf(n);
            auto b = sim::simulate(config(sim::Tree::bst, n, 100000, s));
            EXPECT_GT(sim::chi_square_test(b.histogram, bp).p_value, 1e-4) << "bst n=" << n << " " << to_string(s);
            auto d = sim::simulate(config(sim::Tree::dst, n, 100000, s, Keys::finite));
            EXPECT_GT(sim::chi_square_test(d.histogram, dst::golden_table(s, Keys::finite, n)).p_value, 1e-4)
                << "dst finite n=" << n << " " << to_string(s);
        }
}

TEST(ChiSquare, DetectsWrongSupportAndWrongDistribution) {
    Poly fair{0, Rational(1, 2), Rational(1, 2)};
    EXPECT_EQ(sim::chi_square_test({0, 500, 499, 1}, fair).p_value, 0.0);
    EXPECT_FALSE(sim::chi_square_test({0, 500, 499, 1}, fair).support_ok);
    EXPECT_GT(sim::chi_square_test({0, 5000, 5000}, fair).p_value, 0.99);
    EXPECT_LT(sim::chi_square_test({0, 6000, 4000}, fair).p_value, 1e-10);
}

TEST(Covariance, TwoKeysAgainstExactJointDistribution) {
    const Rational exact = dst::enumerate_successful_pairs(2, Keys::infinite).covariance();
    auto est = sim::simulate_dst_cost_covariance(2, 200000, sim::kDefaultSeed);
    EXPECT_LE(std::abs(est.covariance - exact.to_double()), 4 * est.standard_error + 1e-12);
    EXPECT_DOUBLE_EQ(est.n_times_covariance, 2 * est.covariance);
}

TEST(Covariance, ModerateTreeAgainstVarianceIdentity) {
    const double exact = dst::successful_pair_covariance(10).to_double();
    auto est = sim::simulate_dst_cost_covariance(10, 400000, sim::kDefaultSeed, 2);
    EXPECT_LE(std::abs(est.covariance - exact), 4 * est.standard_error);
}

TEST(Covariance, DegenerateInputsRejected) {
    EXPECT_THROW(sim::simulate_dst_cost_covariance(8, 1, 1), std::invalid_argument);
    EXPECT_THROW(sim::simulate_dst_cost_covariance(1, 100, 1), std::invalid_argument);
    EXPECT_THROW(sim::simulate_bst(config(sim::Tree::bst, 0, 10, Search::successful)), std::invalid_argument);
    EXPECT_THROW(sim::simulate_bst(config(sim::Tree::bst, 3, 0, Search::successful)), std::invalid_argument);
}

TEST(Covariance, Deterministic) {
    auto a = sim::simulate_dst_cost_covariance(16, 20000, 99, 1);
    auto b = sim::simulate_dst_cost_covariance(16, 20000, 99, 3);
    EXPECT_EQ(a.joint, b.joint);
    EXPECT_EQ(a.covariance, b.covariance);
}
