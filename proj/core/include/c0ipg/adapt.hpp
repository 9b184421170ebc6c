#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "c0ipg/coefficients.hpp"
#include "c0ipg/eigen.hpp"
#include "c0ipg/estimator.hpp"
#include "c0ipg/mesh.hpp"

namespace c0ipg {

struct MarkResult {
    std::vector<int> marked;  ///< ascending triangle ids
    bool converged = false;   ///< all indicators were zero
};

/// Bulk marking: a minimal set whose indicator sum reaches theta times the
/// total. Elements are taken in decreasing order, ties by lower id.
MarkResult mark(std::span<const Real> values, Real theta);

enum class RefinementMode { kAdaptive, kUniform };

struct AdaptConfig {
    Real theta = 0.25;
    int degree = 2;
    /// Every solve uses the shift target_k^2 and keeps the closest
    /// eigenvalue. Without it, the target_index-th eigenvalue in the
    /// by-k ordering is taken from the eigenvalues closest to zero.
    std::optional<Complex> target_k;
    int target_index = 1;
    int max_dof = 30000;
    int max_iters = 1000;
    Real tol = 1e-12;
    /// Eigenvalues computed per solve.
    int count = 3;
    RefinementMode mode = RefinementMode::kAdaptive;
    DualResidualForm dual_form = DualResidualForm::kConsistent;

    /// Throws ConfigurationError for invalid values.
    void validate() const;
};

struct IterationRecord {
    int iter = 0;
    int dof = 0;
    int triangles = 0;
    Complex lambda;
    Complex k;
    Real eta2_primal = 0.0;
    Real eta2_dual = 0.0;
    Real eta2_total = 0.0;
    int marked = 0;
    Real seconds = 0.0;
    Real residual = 0.0;
    Real dual_residual = 0.0;
    Complex b_pairing;
};

struct AdaptTrace {
    std::vector<IterationRecord> records;
    bool converged_signal = false;
    /// Empty on success; the solver error message when the run aborted.
    std::string failure;
};

/// Everything produced by one iteration, handed to the observer before marking.
struct IterationState {
    const IterationRecord& record;
    const Mesh& mesh;
    const FeSpace& space;
    const EigenPair& pair;
    const std::vector<Real>& combined;  ///< primal + dual per-element indicator
};

using IterationObserver = std::function<void(const IterationState&)>;

/// Solve, estimate, mark and refine until the DOF bound or iteration bound is
/// reached. Solver failures end the run and are reported in the trace.
AdaptTrace run(const Mesh& initial, const ProblemCoefficients& coeffs, const AdaptConfig& config,
               const IterationObserver& observer = {});
AdaptTrace run(Domain domain, Real h0, const ProblemCoefficients& coeffs, const AdaptConfig& config,
               const IterationObserver& observer = {});

/// One solve on a fixed mesh: the eigenpair closest to the shift, with its dual.
EigenPair solve_eigenpair(const FeSpace& space, const PencilMatrices& pencil, Complex shift,
                          const SolveOptions& options);

}  // namespace c0ipg
