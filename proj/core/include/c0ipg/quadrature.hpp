#pragma once

#include <array>
#include <vector>

#include "c0ipg/types.hpp"

namespace c0ipg {

/// Gauss-Legendre rule on the unit interval [0, 1].
struct LineRule {
    std::vector<Real> points;
    std::vector<Real> weights;
};

/// Returns the n-point Gauss-Legendre rule on [0, 1] (exact for degree 2n-1).
const LineRule& gauss_legendre(int n);

/// Quadrature on the reference triangle with vertices (0,0), (1,0), (0,1).
///
/// Points are stored in reference coordinates (xi, eta); the barycentric
/// coordinates are (1 - xi - eta, xi, eta). Weights sum to the reference
/// area 1/2.
struct TriangleRule {
    int order = 0;
    std::vector<Point> points;
    std::vector<Real> weights;

    [[nodiscard]] std::size_t size() const { return points.size(); }
    [[nodiscard]] std::array<Real, 3> barycentric(std::size_t q) const
    {
        return {1.0 - points[q].x - points[q].y, points[q].x, points[q].y};
    }
};

inline constexpr int kMaxTriangleRuleDegree = 12;

/// Rule exact for all bivariate polynomials of total degree <= d, 1 <= d <= 12.
/// d = 1 is the centroid rule and d = 2 the symmetric three-point rule; higher
/// degrees use a collapsed Gauss product rule, which keeps every weight positive.
const TriangleRule& rule_for_degree(int d);

}  // namespace c0ipg
