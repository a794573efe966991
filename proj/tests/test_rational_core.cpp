#include <treepgf/biseries.hpp>
#include <treepgf/moments.hpp>
#include <treepgf/poly.hpp>
#include <treepgf/rational.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace treepgf;

namespace {

Rational q(const char* s) { return Rational::parse(s); }

Poly random_poly(std::mt19937_64& rng, std::size_t max_degree) {
    std::uniform_int_distribution<int> deg(0, static_cast<int>(max_degree));
    std::uniform_int_distribution<long> num(-9, 9), den(1, 7);
    std::vector<Rational> c(static_cast<std::size_t>(deg(rng)) + 1);
    for (auto& x : c) x = Rational(num(rng), den(rng));
    return Poly(std::move(c));
}

BiSeries random_series(std::mt19937_64& rng, std::size_t nx, std::size_t ny) {
    std::uniform_int_distribution<long> v(-5, 5);
    BiSeries s(nx, ny);
    for (std::size_t i = 0; i <= nx; ++i)
        for (std::size_t j = 0; j <= ny; ++j) s.at(i, j) = Rational(v(rng));
    if (s.coeff(0, 0).is_zero()) s.at(0, 0) = 3;
    return s;
}

}  // namespace

TEST(Rational, CanonicalForm) {
    Rational r(6, -4);
    EXPECT_EQ(r.str(), "-3/2");
    EXPECT_EQ(r.denominator(), 2);
    EXPECT_EQ(Rational(10, 5).str(), "2");
    EXPECT_EQ(q("4/6"), q("2/3"));
    EXPECT_EQ(q("-0/5").str(), "0");
}

TEST(Rational, GcdIsOneAfterEveryOperation) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> v(-50, 50), d(1, 60);
    for (int t = 0; t < 500; ++t) {
        Rational a(v(rng), d(rng)), b(v(rng), d(rng));
        for (const Rational& r : {a + b, a - b, a * b}) {
            BigInt g;
            mpz_gcd(g.get_mpz_t(), r.numerator().get_mpz_t(), r.denominator().get_mpz_t());
            EXPECT_EQ(g, 1);
            EXPECT_GT(r.denominator(), 0);
        }
    }
}

TEST(Rational, ParseRejectsMalformedAndZeroDenominator) {
    EXPECT_THROW(q(""), std::invalid_argument);
    EXPECT_THROW(q("1/"), std::invalid_argument);
    EXPECT_THROW(q("a/2"), std::invalid_argument);
    EXPECT_THROW(q("1/-2"), std::invalid_argument);
    EXPECT_THROW(q("1/0"), std::domain_error);
    EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
}

TEST(Rational, HelperFunctions) {
    EXPECT_EQ(pow2(-3), q("1/8"));
    EXPECT_EQ(pow2(10), Rational(1024));
    EXPECT_EQ(pow(q("-2/3"), 3), q("-8/27"));
    EXPECT_EQ(binomial(10, 3), 120);
    EXPECT_EQ(factorial(6), 720);
    EXPECT_EQ(falling_factorial(16, 5), 524160);
    EXPECT_TRUE(divides(BigInt(21), BigInt(84)));
    EXPECT_LT(q("1/3"), q("1/2"));
}

TEST(Poly, MultiplicationExamples) {
    const Poly z = Poly::monomial(1);
    EXPECT_EQ(poly_mul(z, z), Poly::monomial(2));
    const Poly p{q("1/3"), q("-2"), q("5/7")};
    EXPECT_EQ(poly_mul(Poly::constant(1), p), p);
    const Poly h{Rational(0), q("1/2"), q("1/2")};
    EXPECT_EQ(poly_mul(h, h), (Poly{Rational(0), Rational(0), q("1/4"), q("1/2"), q("1/4")}));
}

TEST(Poly, DegreeOfProductIsSumOfDegrees) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 100; ++t) {
        Poly a = random_poly(rng, 6), b = random_poly(rng, 6);
        if (a.is_zero() || b.is_zero()) continue;
        EXPECT_EQ((a * b).degree(), a.degree() + b.degree());
    }
}

TEST(Poly, DerivativeExamples) {
    EXPECT_EQ(poly_derivative(Poly::monomial(1)), Poly::constant(1));
    EXPECT_EQ(poly_derivative(Poly::monomial(3), 2), Poly::monomial(1, 6));
    EXPECT_EQ(derivative_at_one(Poly{Rational(0), q("1/3"), q("2/3")}, 1), q("5/3"));
    EXPECT_THROW(poly_derivative(Poly::monomial(2), 0), std::invalid_argument);
    EXPECT_TRUE(poly_derivative(Poly::constant(5)).is_zero());
}

TEST(Poly, MultiplicationIsCommutativeAndAssociative) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 100; ++t) {
        Poly a = random_poly(rng, 5), b = random_poly(rng, 5), c = random_poly(rng, 5);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a * b) * c, a * (b * c));
    }
}

TEST(Poly, LeibnizRuleHoldsExactly) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 100; ++t) {
        Poly a = random_poly(rng, 6), b = random_poly(rng, 6);
        EXPECT_EQ(poly_derivative(a * b), poly_derivative(a) * b + a * poly_derivative(b));
    }
}

TEST(Poly, FusedDerivativeAtOneMatchesExplicitDerivative) {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 50; ++t) {
        Poly a = random_poly(rng, 8);
        for (unsigned r = 1; r <= 4; ++r) EXPECT_EQ(derivative_at_one(a, r), poly_derivative(a, r).eval(1));
    }
}

TEST(Poly, JsonRoundTripAndTrailingZeros) {
    Poly p{q("1/2"), Rational(0), q("-3/4"), Rational(0), Rational(0)};
    EXPECT_EQ(p.degree(), 2U);
    EXPECT_EQ(p.to_json().dump(), R"(["1/2","0","-3/4"])");
    EXPECT_EQ(Poly::from_json(p.to_json()), p);
    EXPECT_EQ(Poly{}.to_json().dump(), R"(["0"])");
}

TEST(Poly, ProbabilityChecks) {
    EXPECT_TRUE(is_probability_pgf(Poly{Rational(0), q("1/3"), q("2/3")}));
    EXPECT_FALSE(is_probability_pgf(Poly{Rational(0), q("1/3"), q("1/3")}));
    EXPECT_FALSE(is_probability_pgf(Poly{q("-1/3"), q("4/3")}));
    EXPECT_EQ(pgf_variance(Poly{Rational(0), q("1/3"), q("2/3")}), q("2/9"));
}

TEST(BiSeries, InvertGeometricSeries) {
    BiSeries one_minus_x = BiSeries::from_poly_x(Poly{Rational(1), Rational(-1)}, 2, 0);
    BiSeries inv = biseries_invert(one_minus_x);
    EXPECT_EQ(inv.coeff(0, 0), 1);
    EXPECT_EQ(inv.coeff(1, 0), 1);
    EXPECT_EQ(inv.coeff(2, 0), 1);
}

TEST(BiSeries, InvertTwoMinusXMinusY) {
    BiSeries s = BiSeries::from_poly_x_plus_y(Poly{Rational(2), Rational(-1)}, 3, 3);
    BiSeries inv = biseries_invert(s);
    EXPECT_EQ(inv.coeff(0, 0), q("1/2"));
    // 1/(2 - t) = sum t^k / 2^{k+1}; coefficient of x y is C(2,1)/8.
    EXPECT_EQ(inv.coeff(1, 1), q("1/4"));
}

TEST(BiSeries, InverseTimesSeriesIsOne) {
    std::mt19937_64 rng(15);
    for (int t = 0; t < 20; ++t) {
        BiSeries s = random_series(rng, 4, 3);
        BiSeries prod = biseries_invert(s) * s;
        EXPECT_EQ(prod, BiSeries::constant(1, 4, 3));
    }
}

TEST(BiSeries, ZeroConstantTermIsSingular) {
    BiSeries s = BiSeries::from_poly_x(Poly{Rational(0), Rational(1)}, 3, 3);
    EXPECT_THROW(biseries_invert(s), singular_series);
}

TEST(BiSeries, MixedOrdersTruncateToMinimum) {
    BiSeries a = BiSeries::constant(1, 4, 2), b = BiSeries::constant(2, 2, 5);
    BiSeries c = a * b;
    EXPECT_EQ(c.order_x(), 2U);
    EXPECT_EQ(c.order_y(), 2U);
}

TEST(Moments, ConversionChainOnKnownDistribution) {
    // Uniform on {1, 2}: mean 3/2, variance 1/4, third cumulant 0, fourth -1/8.
    Poly p{Rational(0), q("1/2"), q("1/2")};
    std::vector<Rational> fact{1};
    for (unsigned r = 1; r <= 4; ++r) fact.push_back(derivative_at_one(p, r));
    auto kappa = factorial_to_cumulants(fact);
    EXPECT_EQ(kappa[1], q("3/2"));
    EXPECT_EQ(kappa[2], q("1/4"));
    EXPECT_EQ(kappa[3], 0);
    EXPECT_EQ(kappa[4], q("-1/8"));
}

TEST(Moments, VarianceFromFactorialMoments) {
    auto m = Moments::from_factorial(2, q("5/3"), q("4/3"));
    EXPECT_EQ(m.variance, q("2/9"));
}
