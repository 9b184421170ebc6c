#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "c0ipg/assembly.hpp"
#include "c0ipg/space.hpp"
#include "c0ipg/types.hpp"

namespace c0ipg {

/// y -> x for a linear operator on C^n.
using LinearOperator = std::function<void(const ComplexVector& in, ComplexVector& out)>;

struct ArnoldiOptions {
    int nev = 1;
    /// Krylov dimension; 0 selects max(20, 4 nev), clamped to n.
    int krylov_dim = 0;
    /// Ritz pairs are accepted when the residual is below tol * |theta|.
    Real tol = 1e-12;
    int max_restarts = 500;
    std::uint64_t seed = 0x5eedc01b6ULL;
};

struct RitzPairs {
    std::vector<Complex> values;   ///< sorted by decreasing magnitude
    ComplexMatrix vectors;         ///< unit columns
    std::vector<Real> residuals;   ///< Arnoldi residual estimates
    int restarts = 0;
};

/// Krylov-Schur restarted Arnoldi for the nev eigenvalues of largest
/// magnitude. Throws SolverError when the budget of restarts is exhausted.
RitzPairs krylov_schur(const LinearOperator& op, int n, const ArnoldiOptions& options);

/// Shift-invert spectral transform of the pencil (A, B).
class SpectralTransform {
public:
    virtual ~SpectralTransform() = default;
    [[nodiscard]] virtual int size() const = 0;
    [[nodiscard]] virtual Complex shift() const = 0;
    /// x = (A - s B)^{-1} B y.
    virtual void apply(const ComplexVector& y, ComplexVector& x) const = 0;
    /// x = (A - s B)^{-H} B^H y.
    virtual void apply_adjoint(const ComplexVector& y, ComplexVector& x) const = 0;
};

/// Factorizes the full matrix A - s B. Works for any square pencil.
std::unique_ptr<SpectralTransform> make_general_transform(const SparseReal& A, const SparseReal& B,
                                                          Complex shift);

/// Uses the block structure of the C0IPG pencil: only the N x N matrix
/// a_h - s K + s^2 M_b is factorized (in real arithmetic for real s).
std::unique_ptr<SpectralTransform> make_pencil_transform(const PencilMatrices& pencil, Complex shift);

struct SolveOptions {
    int count = 1;
    Real tol = 1e-12;
    int krylov_dim = 0;
    int max_restarts = 500;
    /// Relative shift perturbation and number of attempts on factorization failure.
    Real shift_perturbation = 0.05;
    int max_shift_tries = 5;
};

struct RawEigenPair {
    Complex lambda;
    ComplexVector x;
    /// ||A x - lambda B x|| / ||x|| in the Euclidean norm.
    Real residual = 0.0;
    /// residual / (||A||_1 + |lambda| ||B||_1), the normwise backward error.
    Real backward_error = 0.0;
};

struct DualVector {
    Complex lambda_star;  ///< eigenvalue of the adjoint problem, conj(lambda)
    ComplexVector y;      ///< left eigenvector: A^H y = conj(lambda) B^H y
    Real residual = 0.0;
    Real backward_error = 0.0;
};

/// Shift-invert eigensolver with a reusable factorization.
class PencilEigensolver {
public:
    PencilEigensolver(const PencilMatrices& pencil, Complex shift, SolveOptions options = {});
    PencilEigensolver(const SparseReal& A, const SparseReal& B, Complex shift, SolveOptions options = {});

    /// Shift actually factorized (after perturbations).
    [[nodiscard]] Complex shift() const { return transform_->shift(); }
    [[nodiscard]] int shift_attempts() const { return attempts_; }

    /// The options.count eigenpairs closest to the shift, ordered by distance.
    [[nodiscard]] std::vector<RawEigenPair> solve() const;

    /// Left eigenvector for the converged eigenvalue lambda, computed by
    /// Arnoldi on the adjoint transform with the same factorization.
    [[nodiscard]] DualVector solve_dual(Complex lambda) const;

private:
    void factorize(const std::function<std::unique_ptr<SpectralTransform>(Complex)>& make, Complex shift);

    const SparseReal* A_;
    const SparseReal* B_;
    SolveOptions options_;
    std::unique_ptr<SpectralTransform> transform_;
    int attempts_ = 0;
    Real norm_a_ = 0.0;
    Real norm_b_ = 0.0;
};

std::vector<RawEigenPair> solve_pencil(const PencilMatrices& pencil, Complex target_shift,
                                       const SolveOptions& options = {});
DualVector solve_dual(const PencilMatrices& pencil, Complex lambda, Complex shift,
                      const SolveOptions& options = {});

/// ||A x - lambda B x|| / ||x|| and the matching normwise backward error.
std::pair<Real, Real> pencil_residual(const SparseReal& A, const SparseReal& B, Complex lambda,
                                      const ComplexVector& x);

/// A normalized primal eigenpair and, when attached, its dual pair.
struct EigenPair {
    Complex lambda;
    Complex k;  ///< principal square root of lambda
    FeFunction u;
    FeFunction omega;
    Real residual = 0.0;
    Real backward_error = 0.0;

    bool has_dual = false;
    Complex lambda_star;
    FeFunction u_star;
    FeFunction omega_star;
    Real dual_residual = 0.0;
    Real dual_backward_error = 0.0;
    /// B((u, omega), (u*, omega*)).
    Complex b_pairing;

    [[nodiscard]] ComplexVector stacked() const;
    [[nodiscard]] ComplexVector stacked_dual() const;
};

/// Rescales each pair to ||(u, omega)||_h = 1, fixes the phase so the
/// largest-modulus entry of u is real positive, and sorts by (Re k ascending,
/// Im k descending).
std::vector<EigenPair> normalize_and_sort(const std::vector<RawEigenPair>& raw, const PencilMatrices& pencil,
                                          const FeSpace& space);

/// Builds (u*, omega*) from a left eigenvector: the A_h-orthogonal projection
/// of (u, omega) onto span{y}, scaled to unit mesh-dependent norm.
void attach_dual(EigenPair& pair, const DualVector& dual, const PencilMatrices& pencil);

}  // namespace c0ipg
