#include "c0ipg/coefficients.hpp"

#include <limits>
#include <sstream>
#include <utility>

#include "c0ipg/mesh.hpp"
#include "c0ipg/quadrature.hpp"
#include "c0ipg/space.hpp"

namespace c0ipg {

ProblemCoefficients::ProblemCoefficients(std::string name, RefractionIndex n, Real sigma, Real mu)
    : name_(std::move(name)), n_(std::move(n)), sigma_(sigma), mu_(mu)
{
    if (!n_.value || !n_.gradient || !n_.laplacian) {
        throw ConfigurationError("refraction index needs value, gradient and laplacian callbacks");
    }
}

CoefficientSample ProblemCoefficients::at(Point p) const
{
    CoefficientSample s;
    s.n = n_.value(p);
    s.grad_n = n_.gradient(p);
    s.lap_n = n_.laplacian(p);
    const Real d = s.n - 1.0;
    s.c = 1.0 / d;
    s.grad_c = (-1.0 / (d * d)) * s.grad_n;
    s.lap_c = -s.lap_n / (d * d) + 2.0 * dot(s.grad_n, s.grad_n) / (d * d * d);
    s.a = s.c - mu_;
    s.b = 1.0 + s.c;
    return s;
}

ProblemCoefficients ProblemCoefficients::with_parameters(Real sigma, Real mu) const
{
    return {name_, n_, sigma, mu};
}

ProblemCoefficients builtin_coefficients(std::string_view name)
{
    if (name == "n16") {
        RefractionIndex n{[](Point) { return 16.0; }, [](Point) { return Point{0.0, 0.0}; },
                          [](Point) { return 0.0; }};
        return {"n16", std::move(n), 30.0, 1.0 / 15.0};
    }
    if (name == "affine") {
        RefractionIndex n{[](Point p) { return 8.0 + p.x - p.y; }, [](Point) { return Point{1.0, -1.0}; },
                          [](Point) { return 0.0; }};
        return {"affine", std::move(n), 20.0, 1.0 / 9.0};
    }
    throw ConfigurationError("unknown refraction index '" + std::string(name) + "' (expected n16 or affine)");
}

ValidationReport validate(const ProblemCoefficients& coeffs, const Mesh& mesh, const FeSpace& space)
{
    // Roundoff allowance for the borderline case mu = 1/(n-1).
    constexpr Real kSlack = 1e-14;

    ValidationReport report;
    report.sigma = coeffs.sigma();
    report.min_n_minus_one = std::numeric_limits<Real>::infinity();
    report.min_a = std::numeric_limits<Real>::infinity();

    auto fail = [](const std::string& what, Point p, Real value) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << " at (" << p.x << ", " << p.y << "): " << value;
        throw ConfigurationError(msg.str());
    };

    if (!(coeffs.sigma() > 1.0)) {
        std::ostringstream msg;
        msg << "penalty sigma must exceed 1, got " << coeffs.sigma();
        throw ConfigurationError(msg.str());
    }
    if (!(coeffs.mu() > 0.0)) {
        std::ostringstream msg;
        msg << "splitting parameter mu must be positive, got " << coeffs.mu();
        throw ConfigurationError(msg.str());
    }

    const TriangleRule& rule = rule_for_degree(2 * space.degree() + 2);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto corners = mesh.corners(t);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto lam = rule.barycentric(q);
            const Point x = lam[0] * corners[0] + lam[1] * corners[1] + lam[2] * corners[2];
            const Real n1 = coeffs.index().value(x) - 1.0;
            if (n1 < report.min_n_minus_one) {
                report.min_n_minus_one = n1;
                report.min_n_point = x;
            }
            if (!(n1 > 0.0)) {
                fail("refraction index must exceed 1; n - 1", x, n1);
            }
            const Real a = 1.0 / n1 - coeffs.mu();
            if (a < report.min_a) {
                report.min_a = a;
                report.min_a_point = x;
            }
            if (a < -kSlack) {
                fail("1/(n-1) - mu must be nonnegative; value", x, a);
            }
        }
    }
    return report;
}

}  // namespace c0ipg
