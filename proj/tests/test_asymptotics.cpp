#include <treepgf/asymptotics.hpp>

#include <gtest/gtest.h>

using namespace treepgf;
namespace as = treepgf::asymptotics;

namespace {

Rational q(const char* s) { return Rational::parse(s); }

/// Digits of x agree with the decimal string to within half a unit in its last place.
bool matches_digits(const Real& x, const char* decimal) {
    const std::string s(decimal);
    const auto dot = s.find('.');
    const int places = static_cast<int>(s.size() - dot - 1);
    return abs(x - Real(decimal)) <= pow(Real(10), -places) / 2;
}

}  // namespace

TEST(Constants, PartialProducts) {
    EXPECT_EQ(as::partial_Q(0), 1);
    EXPECT_EQ(as::partial_Q(1), q("1/2"));
    EXPECT_EQ(as::partial_Q(2), q("3/8"));
    EXPECT_EQ(as::partial_Q(3), q("21/64"));
}

TEST(Constants, AlphaBetaQ) {
    const auto alpha = as::constant_alpha(30);
    EXPECT_TRUE(matches_digits(alpha.value, "1.6066951524"));
    const auto beta = as::constant_beta(30);
    EXPECT_LT(beta.value, alpha.value);
    // beta > first two terms, below the first term plus the geometric rest
    EXPECT_GT(beta.value, Real(1) + Real(1) / 9);
    const auto Q = as::constant_Q(30);
    EXPECT_GT(Q.value, Real("0.25"));
    EXPECT_LT(Q.value, Real("0.5"));
    for (std::size_t l = 1; l <= 20; ++l) EXPECT_LT(Q.value, to_real(as::partial_Q(l)));
    EXPECT_LT(Q.error_bound, tolerance(31));
}

TEST(Constants, AlphaAgainstPlainSum) {
    Real s = 0;
    for (int j = 1; j <= 200; ++j) s += 1 / (pow(Real(2), j) - 1);
    EXPECT_LT(abs(as::constant_alpha(35).value - s), tolerance(35));
}

TEST(Phi, SpecialValuesAndTwoPaths) {
    EXPECT_EQ(as::phi(Real(1)), Real("0.5"));
    EXPECT_LT(abs(as::phi(Real(2)) - (1 - ln2())), tolerance(40));
    for (const char* eps : {"1e-3", "-1e-3", "5e-3", "9e-3"}) {
        const Real x = 1 + Real(eps);
        const Real direct = (x - log(x) - 1) / ((x - 1) * (x - 1));
        // the direct form loses about 2 log10(1/eps) digits to cancellation
        EXPECT_LT(abs(as::phi(x) - direct), Real("1e-38")) << eps;
    }
    EXPECT_THROW(as::phi(Real(0)), std::domain_error);
    EXPECT_THROW(as::phi(Real(-1)), std::domain_error);
}

TEST(Phi, PositiveAndDecreasing) {
    Real prev = as::phi(Real(1) / 100);
    for (int i = 2; i <= 400; ++i) {
        const Real x = Real(i) / 100;
        const Real v = as::phi(x);
        EXPECT_GT(v, 0) << i;
        EXPECT_LT(v, prev) << i;
        prev = v;
    }
}

TEST(ConstantC, ReferenceDigits) {
    const auto C = as::constant_C(30);
    EXPECT_TRUE(matches_digits(C.value, "0.2660036454"));
    EXPECT_LT(C.error_bound, tolerance(30));
}

TEST(ConstantC, TruncationStability) {
    const Real a = as::constant_C_truncated(40, 40, 40);
    const Real b = as::constant_C_truncated(50, 50, 50);
    EXPECT_LT(abs(a - b), Real("1e-11"));
    EXPECT_LT(abs(b - as::constant_C(30).value), Real("1e-14"));
}

TEST(ConstantC, FirstTerm) {
    const Real Q = as::constant_Q(35).value;
    EXPECT_LT(abs(as::constant_C_truncated(0, 0, 0) - Q / ln2() * as::phi(Real(2))), tolerance(35));
}

TEST(ConstantD, ReferenceDigitsAndDefinition) {
    const auto D = as::constant_D(30);
    EXPECT_TRUE(matches_digits(D.value, "-0.4970105417"));
    const Real rest = Real(-1) / 12 - pi() * pi() / (6 * ln2() * ln2()) + as::constant_alpha(30).value
                    + as::constant_beta(30).value;
    EXPECT_LT(abs(D.value - as::constant_C(30).value - rest), tolerance(28));
    EXPECT_LT(abs(as::constant_D(20).value - D.value), Real("1e-15"));
}

TEST(Constants, PrecisionIncreaseKeepsDigits) {
    EXPECT_LT(abs(as::constant_C(15).value - as::constant_C(30).value), tolerance(15));
    EXPECT_LT(abs(as::constant_alpha(10).value - as::constant_alpha(40).value), tolerance(10));
    EXPECT_THROW(as::constant_C(0), std::invalid_argument);
    EXPECT_THROW(as::constant_C(41), std::invalid_argument);
}

TEST(Predictions, ClosedFormEvaluations) {
    const Real n = 1000;
    const Real expected = 2 * log(n) + 2 * (euler_gamma() - 1) + 3 / n;
    EXPECT_LT(abs(as::asymptotic_prediction(as::Family::bst_unsucc_mean, 1000) - expected), tolerance(35));
    // leading coefficient of the path-length variance
    const Real a = as::asymptotic_prediction(as::Family::bst_L_var, 1000000000) / Real(1e18);
    EXPECT_LT(abs(a - (7 - 2 * pi() * pi() / 3)), Real("1e-7"));
    const Real c = as::asymptotic_prediction(as::Family::dst_L_var, 1000) / 1000;
    EXPECT_TRUE(matches_digits(c, "0.2660036454"));
    EXPECT_THROW(as::asymptotic_prediction(as::Family::bst_unsucc_mean, 1), std::invalid_argument);
    EXPECT_THROW(as::parse_family("bst-unknown"), std::invalid_argument);
    EXPECT_EQ(as::parse_family("bst-L-mean"), as::Family::bst_L_mean);
}

TEST(Convergence, BstMeansDecayFasterThanOneOverN) {
    for (auto f : {as::Family::bst_unsucc_mean, as::Family::bst_succ_mean}) {
        auto rep = as::convergence_report(f, {100, 1000, 10000});
        EXPECT_TRUE(rep.scaled_residuals_decreasing()) << as::to_string(f);
    }
}

TEST(Convergence, BstVariancesDecayFasterThanOneOverN) {
    for (auto f : {as::Family::bst_unsucc_var, as::Family::bst_succ_var}) {
        auto rep = as::convergence_report(f, {100, 1000, 10000});
        EXPECT_TRUE(rep.scaled_residuals_decreasing()) << as::to_string(f);
    }
}

TEST(Convergence, BstPathLengthMeanResidualBoundedAndDecreasing) {
    auto rep = as::convergence_report(as::Family::bst_L_mean, {32, 64, 128, 256, 512, 1024});
    EXPECT_TRUE(rep.scaled_residuals_decreasing());
    for (const auto& row : rep.rows) EXPECT_LT(row.residual, Real(1));
}

TEST(Convergence, BstPathLengthVarianceResidualDecreasing) {
    auto rep = as::convergence_report(as::Family::bst_L_var, {32, 64, 128, 256, 512});
    EXPECT_TRUE(rep.scaled_residuals_decreasing());
}

TEST(Convergence, DstFamiliesStayInBand) {
    // Periodic fluctuations are not modelled, so only a band is checked.
    auto mean = as::convergence_report(as::Family::dst_L_mean, {64, 128, 256, 512});
    for (const auto& row : mean.rows) EXPECT_LT(row.residual, Real("0.05")) << row.n;
    auto var = as::convergence_report(as::Family::dst_L_var, {64, 128, 256, 512});
    for (const auto& row : var.rows) EXPECT_LT(row.scaled_residual, Real("0.05")) << row.n;
    EXPECT_FALSE(mean.decay_expected);
}

TEST(Convergence, ReportUsesExactMoments) {
    auto rep = as::convergence_report(as::Family::bst_unsucc_mean, {2, 3});
    EXPECT_EQ(rep.rows[0].exact, q("5/3"));
    EXPECT_EQ(rep.rows[1].exact, q("13/6"));
    auto j = rep.to_json();
    EXPECT_EQ(j["rows"][0]["exact"], "5/3");
}
