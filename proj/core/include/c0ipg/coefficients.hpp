#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "c0ipg/types.hpp"

namespace c0ipg {

class Mesh;
class FeSpace;

/// Index of refraction with analytic first derivatives and Laplacian.
struct RefractionIndex {
    std::function<Real(Point)> value;
    std::function<Point(Point)> gradient;
    std::function<Real(Point)> laplacian;
};

/// Coefficient values at one point.
///
/// c = 1/(n-1), a = c - mu, b = n/(n-1) = 1 + c, so grad b = grad c and
/// lap b = lap c.
struct CoefficientSample {
    Real n = 0.0;
    Point grad_n;
    Real lap_n = 0.0;
    Real c = 0.0;
    Point grad_c;
    Real lap_c = 0.0;
    Real a = 0.0;
    Real b = 0.0;
};

class ProblemCoefficients {
public:
    ProblemCoefficients(std::string name, RefractionIndex n, Real sigma, Real mu);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] Real sigma() const { return sigma_; }
    [[nodiscard]] Real mu() const { return mu_; }
    [[nodiscard]] const RefractionIndex& index() const { return n_; }

    [[nodiscard]] CoefficientSample at(Point p) const;

    /// Same refraction index with different penalty/splitting parameters.
    [[nodiscard]] ProblemCoefficients with_parameters(Real sigma, Real mu) const;

private:
    std::string name_;
    RefractionIndex n_;
    Real sigma_;
    Real mu_;
};

/// "n16": n = 16 with (sigma, mu) = (30, 1/15).
/// "affine": n = 8 + x - y with (sigma, mu) = (20, 1/9).
ProblemCoefficients builtin_coefficients(std::string_view name);

struct ValidationReport {
    Real min_n_minus_one = 0.0;  ///< empirical delta
    Real min_a = 0.0;            ///< min of 1/(n-1) - mu
    Real sigma = 0.0;
    Point min_n_point;
    Point min_a_point;
};

/// Checks n > 1, 1/(n-1) - mu >= 0 and sigma > 1 at every element quadrature
/// point of the space. Throws ConfigurationError naming the failing point.
ValidationReport validate(const ProblemCoefficients& coeffs, const Mesh& mesh, const FeSpace& space);

}  // namespace c0ipg
