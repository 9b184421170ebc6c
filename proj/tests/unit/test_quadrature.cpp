#include <cmath>

#include <gtest/gtest.h>

#include <c0ipg/mesh.hpp>
#include <c0ipg/quadrature.hpp>

using namespace c0ipg;

namespace {

Real factorial(int n)
{
    return std::tgamma(static_cast<Real>(n) + 1.0);
}

// Integral of x^a y^b over the reference triangle.
Real reference_monomial(int a, int b)
{
    return factorial(a) * factorial(b) / factorial(a + b + 2);
}

}  // namespace

TEST(TriangleRule, MonomialExactnessTable)
{
    for (int d = 1; d <= kMaxTriangleRuleDegree; ++d) {
        const TriangleRule& rule = rule_for_degree(d);
        EXPECT_GE(rule.order, d);
        for (int a = 0; a <= d; ++a) {
            for (int b = 0; a + b <= d; ++b) {
                Real sum = 0.0;
                for (std::size_t q = 0; q < rule.size(); ++q) {
                    sum += rule.weights[q] * std::pow(rule.points[q].x, a) * std::pow(rule.points[q].y, b);
                }
                const Real exact = reference_monomial(a, b);
                EXPECT_NEAR(sum, exact, 1e-13 * exact) << "degree " << d << " monomial x^" << a << " y^" << b;
            }
        }
    }
}

TEST(TriangleRule, PositiveWeightsInsideTriangle)
{
    for (int d = 1; d <= kMaxTriangleRuleDegree; ++d) {
        const TriangleRule& rule = rule_for_degree(d);
        Real total = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            EXPECT_GT(rule.weights[q], 0.0);
            for (Real l : rule.barycentric(q)) {
                EXPECT_GE(l, 0.0);
                EXPECT_LE(l, 1.0);
            }
            total += rule.weights[q];
        }
        EXPECT_NEAR(total, 0.5, 1e-15);
    }
}

TEST(TriangleRule, CentroidRule)
{
    const TriangleRule& rule = rule_for_degree(1);
    ASSERT_EQ(rule.size(), 1u);
    EXPECT_NEAR(rule.points[0].x, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(rule.points[0].y, 1.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(rule.weights[0], 0.5);
}

TEST(TriangleRule, ThreePointRuleIntegratesQuadratics)
{
    const TriangleRule& rule = rule_for_degree(2);
    EXPECT_EQ(rule.size(), 3u);
    Real xx = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        xx += rule.weights[q] * rule.points[q].x * rule.points[q].x;
    }
    EXPECT_NEAR(xx, 1.0 / 12.0, 1e-15);
}

TEST(TriangleRule, DegreeEightBetaIntegral)
{
    const TriangleRule& rule = rule_for_degree(8);
    Real sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        sum += rule.weights[q] * std::pow(rule.points[q].x, 4) * std::pow(rule.points[q].y, 4);
    }
    EXPECT_NEAR(sum, 1.0 / 6300.0, 1e-17);
}

TEST(TriangleRule, RejectsUnsupportedDegree)
{
    EXPECT_THROW(rule_for_degree(0), std::invalid_argument);
    EXPECT_THROW(rule_for_degree(kMaxTriangleRuleDegree + 1), std::invalid_argument);
}

TEST(GaussLegendre, ExactToDegreeTwoNMinusOne)
{
    for (int n = 1; n <= 8; ++n) {
        const LineRule& rule = gauss_legendre(n);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            Real sum = 0.0;
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                sum += rule.weights[q] * std::pow(rule.points[q], p);
            }
            EXPECT_NEAR(sum, 1.0 / (p + 1), 1e-14) << n << " points, degree " << p;
        }
    }
}

TEST(FaceQuadrature, MidpointForOnePoint)
{
    const auto pts = face_quadrature_points({0.0, 0.0}, {1.0, 0.0}, 1);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_DOUBLE_EQ(pts[0].point.x, 0.5);
    EXPECT_DOUBLE_EQ(pts[0].point.y, 0.0);
    EXPECT_DOUBLE_EQ(pts[0].weight, 1.0);
}

TEST(FaceQuadrature, WeightsSumToLength)
{
    for (int n = 1; n <= 6; ++n) {
        Real total = 0.0;
        for (const auto& p : face_quadrature_points({0.0, 1.0}, {std::sqrt(2.0), 1.0 + std::sqrt(2.0)}, n)) {
            total += p.weight;
        }
        EXPECT_NEAR(total, 2.0, 1e-14);
    }
}

TEST(FaceQuadrature, FivePointsIntegrateNinthPower)
{
    Real sum = 0.0;
    for (const auto& p : face_quadrature_points({0.0, 0.0}, {1.0, 0.0}, 5)) {
        sum += p.weight * std::pow(p.point.x, 9);
    }
    EXPECT_NEAR(sum, 0.1, 1e-15);
}
