#pragma once

#include <array>
#include <vector>

#include "c0ipg/coefficients.hpp"
#include "c0ipg/eigen.hpp"
#include "c0ipg/space.hpp"

namespace c0ipg {

enum class ResidualMode {
    kPrimal,  ///< F = -lap(c f) - b lap f - b g
    kDual,    ///< F* = -c lap f - lap(b f) + g, or the literal -b g variant
};

/// Sign convention of the g-term in the dual residual.
enum class DualResidualForm {
    /// +g, the form obtained by integrating the dual equation by parts.
    kConsistent,
    /// -b g, as printed next to the definition of F*.
    kLiteral,
};

/// Data of one residual indicator: the discrete pair (psi, phi) and the right
/// hand side (f, g). For an eigenpair psi = u, phi = omega, f = lambda u and
/// g = lambda omega.
struct ResidualData {
    FeFunction psi;
    FeFunction phi;
    FeFunction f;
    FeFunction g;
    ResidualMode mode = ResidualMode::kPrimal;
    DualResidualForm dual_form = DualResidualForm::kConsistent;

    static ResidualData primal(const EigenPair& pair);
    /// Requires pair.has_dual; uses f = lambda* u*, g = lambda* omega*.
    static ResidualData dual(const EigenPair& pair, DualResidualForm form = DualResidualForm::kConsistent);

    /// F (or F*) at a point from the jets of f and g.
    [[nodiscard]] Complex rhs(const CoefficientSample& s, const FieldJet& fj, const FieldJet& gj) const;
};

struct FaceIndicatorValues {
    Real eta1 = 0.0;  ///< sigma l^{-1/2} |[[d psi/dn]]|, every face
    Real eta2 = 0.0;  ///< mu l^{1/2} |[[d2 psi/dn2]]|, interior faces
    Real eta3 = 0.0;  ///< l^{3/2} |[[d(c lap psi)/dn]]|, interior faces
    Real eta4 = 0.0;  ///< l^{1/2} |[[(c - mu) lap psi]]|, interior faces

    [[nodiscard]] Real sum_sq() const { return eta1 * eta1 + eta2 * eta2 + eta3 * eta3 + eta4 * eta4; }
};

struct IndicatorOptions {
    /// Element quadrature degree; 0 selects 2m + 4.
    int element_degree = 0;
    /// Adds the terms of the source-problem indicator that vanish or are
    /// neglected for eigenpairs: |f - phi|^2, the h^4-weighted face terms.
    bool full_source_form = false;
};

struct IndicatorField {
    std::vector<Real> element;           ///< eta^2(kappa)
    std::vector<Real> element_residual;  ///< eta_kappa
    std::vector<FaceIndicatorValues> faces;
    Real total = 0.0;  ///< eta^2(Omega)
};

struct Oscillations {
    Real f = 0.0;     ///< Osc_j(F)
    Real eta3 = 0.0;  ///< Osc_j(eta_{l,3})
    Real eta4 = 0.0;  ///< Osc_j(eta_{l,4})
};

/// h_kappa^2 |F - lap(c lap psi)|_{0,kappa}.
Real element_residual(const FeSpace& space, const ProblemCoefficients& coeffs, const ResidualData& data,
                      int kappa, int degree = 0);

FaceIndicatorValues face_indicators(const FeSpace& space, const ProblemCoefficients& coeffs,
                                    const ResidualData& data, int face);

/// eta^2_kappa + boundary eta_{l,1}^2 + half the interior face terms.
Real element_indicator(const FeSpace& space, const ProblemCoefficients& coeffs, const ResidualData& data,
                       int kappa, const IndicatorOptions& options = {});

IndicatorField compute_indicators(const FeSpace& space, const ProblemCoefficients& coeffs,
                                  const ResidualData& data, const IndicatorOptions& options = {});

/// Data oscillations with elementwise L2 projection onto P_j.
Oscillations oscillations(const FeSpace& space, const ProblemCoefficients& coeffs, const ResidualData& data,
                          int j);

/// Elementwise L2 projection onto P_j in monomials scaled to the element.
class LocalProjection {
public:
    LocalProjection(const FeSpace& space, int triangle, int j);

    /// Projects the function given at the quadrature points of rule(). The
    /// result is stored as monomial coefficients.
    [[nodiscard]] std::vector<Complex> project(const std::vector<Complex>& values) const;
    /// Value, gradient and Hessian of the projected polynomial at x.
    [[nodiscard]] FieldJet evaluate(const std::vector<Complex>& coeffs, Point x) const;

    [[nodiscard]] const std::vector<Point>& points() const { return points_; }
    [[nodiscard]] const std::vector<Real>& weights() const { return weights_; }

private:
    int j_;
    Point center_;
    Real scale_;
    std::vector<std::array<int, 2>> exponents_;
    std::vector<Point> points_;
    std::vector<Real> weights_;
    RealMatrix basis_;  // basis_(q, k) = monomial k at point q
    Eigen::LDLT<RealMatrix> gram_;
};

}  // namespace c0ipg
