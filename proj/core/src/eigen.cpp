#include "c0ipg/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace c0ipg {

namespace {

constexpr Real kEps = std::numeric_limits<Real>::epsilon();

ComplexVector random_vector(int n, std::mt19937_64& rng)
{
    std::normal_distribution<Real> dist;
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) {
        const Real re = dist(rng);
        const Real im = dist(rng);
        v[i] = Complex(re, im);
    }
    return v;
}

// Orthogonalizes w against the first k columns of V with two passes of
// classical Gram-Schmidt; returns the accumulated coefficients.
ComplexVector orthogonalize(const ComplexMatrix& V, int k, ComplexVector& w)
{
    ComplexVector h = ComplexVector::Zero(k);
    for (int pass = 0; pass < 2; ++pass) {
        const ComplexVector c = V.leftCols(k).adjoint() * w;
        w.noalias() -= V.leftCols(k) * c;
        h += c;
    }
    return h;
}

// Swaps the diagonal entries i and i + 1 of the upper triangular T by a
// unitary rotation, updating the Schur vectors U.
void swap_schur(ComplexMatrix& T, ComplexMatrix& U, int i)
{
    const Complex t11 = T(i, i);
    const Complex t12 = T(i, i + 1);
    const Complex t22 = T(i + 1, i + 1);
    Complex x1 = t12;
    Complex x2 = t22 - t11;
    const Real r = std::hypot(std::abs(x1), std::abs(x2));
    if (r == 0.0) {
        return;
    }
    x1 /= r;
    x2 /= r;
    Eigen::Matrix2cd G;
    G << x1, -std::conj(x2), x2, std::conj(x1);
    T.middleRows(i, 2) = G.adjoint() * T.middleRows(i, 2);
    T.middleCols(i, 2) = T.middleCols(i, 2) * G;
    U.middleCols(i, 2) = U.middleCols(i, 2) * G;
    T(i + 1, i) = 0.0;
    T(i, i) = t22;
    T(i + 1, i + 1) = t11;
}

// Eigenvector of the upper triangular T for its i-th diagonal entry.
ComplexVector triangular_eigenvector(const ComplexMatrix& T, int i)
{
    const int m = static_cast<int>(T.rows());
    const Real floor = kEps * std::max(T.norm(), 1.0);
    ComplexVector y = ComplexVector::Zero(m);
    y[i] = 1.0;
    for (int j = i - 1; j >= 0; --j) {
        Complex s = 0.0;
        for (int l = j + 1; l <= i; ++l) {
            s += T(j, l) * y[l];
        }
        Complex d = T(j, j) - T(i, i);
        if (std::abs(d) < floor) {
            d = floor;
        }
        y[j] = -s / d;
    }
    return y.normalized();
}

void solve_real(Eigen::SparseLU<SparseReal>& lu, bool transpose, const ComplexVector& rhs,
                ComplexVector& x)
{
    RealMatrix b(rhs.size(), 2);
    b.col(0) = rhs.real();
    b.col(1) = rhs.imag();
    RealMatrix sol = transpose ? RealMatrix(lu.transpose().solve(b)) : RealMatrix(lu.solve(b));
    x.resize(rhs.size());
    x.real() = sol.col(0);
    x.imag() = sol.col(1);
}

ComplexVector times(const SparseReal& s, const ComplexVector& y)
{
    ComplexVector out(s.rows());
    out.real() = s * y.real();
    out.imag() = s * y.imag();
    return out;
}

ComplexVector times_transpose(const SparseReal& s, const ComplexVector& y)
{
    ComplexVector out(s.cols());
    out.real() = s.transpose() * y.real();
    out.imag() = s.transpose() * y.imag();
    return out;
}

Real norm_one(const SparseReal& s)
{
    Real best = 0.0;
    for (int k = 0; k < s.outerSize(); ++k) {
        Real col = 0.0;
        for (SparseReal::InnerIterator it(s, k); it; ++it) {
            col += std::abs(it.value());
        }
        best = std::max(best, col);
    }
    return best;
}

bool is_real(Complex s)
{
    return std::abs(s.imag()) <= 1e-14 * std::max(1.0, std::abs(s));
}

std::string describe(Complex s)
{
    std::ostringstream out;
    out.precision(12);
    out << s.real() << (s.imag() < 0 ? " - " : " + ") << std::abs(s.imag()) << "i";
    return out.str();
}

class GeneralTransform final : public SpectralTransform {
public:
    GeneralTransform(const SparseReal& A, const SparseReal& B, Complex shift) : B_(&B), shift_(shift)
    {
        SparseComplex C = A.cast<Complex>() - shift * B.cast<Complex>();
        C.makeCompressed();
        lu_.analyzePattern(C);
        lu_.factorize(C);
        if (lu_.info() != Eigen::Success) {
            throw FactorizationError("sparse LU of A - sB failed at shift " + describe(shift) + ": " +
                                     lu_.lastErrorMessage());
        }
    }

    [[nodiscard]] int size() const override { return static_cast<int>(B_->rows()); }
    [[nodiscard]] Complex shift() const override { return shift_; }

    void apply(const ComplexVector& y, ComplexVector& x) const override { x = lu_.solve(times(*B_, y)); }

    void apply_adjoint(const ComplexVector& y, ComplexVector& x) const override
    {
        x = lu_.adjoint().solve(times_transpose(*B_, y));
    }

private:
    const SparseReal* B_;
    Complex shift_;
    mutable Eigen::SparseLU<SparseComplex> lu_;
};

// With Q(s) = a_h - s K + s^2 M_b:
//   (A - sB)^{-1} B y:    x1 = Q^{-1}(K y1 - M_b y2 - s M_b y1),  x2 = y1 + s x1
//   (A - sB)^{-H} B^H y:  z1 = Q^{-H}(K^T y1 + M y2 - conj(s) M_b y1),
//                         z2 = -M^{-1} M_b (y1 + conj(s) z1)
class PencilTransform final : public SpectralTransform {
public:
    PencilTransform(const PencilMatrices& p, Complex shift) : p_(&p), shift_(shift), real_(is_real(shift))
    {
        if (real_) {
            shift_ = shift.real();
            const Real s = shift.real();
            SparseReal Q = p.a_h - s * p.stiffness + (s * s) * p.mass_b;
            Q.makeCompressed();
            real_lu_.analyzePattern(Q);
            real_lu_.factorize(Q);
            if (real_lu_.info() != Eigen::Success) {
                throw FactorizationError("sparse LU of the reduced pencil failed at shift " + describe(shift) +
                                         ": " + real_lu_.lastErrorMessage());
            }
        } else {
            SparseComplex Q = p.a_h.cast<Complex>() - shift * p.stiffness.cast<Complex>() +
                              (shift * shift) * p.mass_b.cast<Complex>();
            Q.makeCompressed();
            complex_lu_.analyzePattern(Q);
            complex_lu_.factorize(Q);
            if (complex_lu_.info() != Eigen::Success) {
                throw FactorizationError("sparse LU of the reduced pencil failed at shift " + describe(shift) +
                                         ": " + complex_lu_.lastErrorMessage());
            }
        }
    }

    [[nodiscard]] int size() const override { return 2 * p_->num_free; }
    [[nodiscard]] Complex shift() const override { return shift_; }

    void apply(const ComplexVector& y, ComplexVector& x) const override
    {
        const int n = p_->num_free;
        const ComplexVector y1 = y.head(n);
        const ComplexVector y2 = y.tail(n);
        const ComplexVector rhs = times(p_->stiffness, y1) - times(p_->mass_b, y2 + shift_ * y1);
        ComplexVector x1;
        solve(rhs, false, x1);
        x.resize(2 * n);
        x.head(n) = x1;
        x.tail(n) = y1 + shift_ * x1;
    }

    void apply_adjoint(const ComplexVector& y, ComplexVector& x) const override
    {
        const int n = p_->num_free;
        const Complex sc = std::conj(shift_);
        const ComplexVector y1 = y.head(n);
        const ComplexVector y2 = y.tail(n);
        const ComplexVector rhs = times_transpose(p_->stiffness, y1) + times(p_->mass, y2) - sc * times(p_->mass_b, y1);
        ComplexVector z1;
        solve(rhs, true, z1);
        const ComplexVector r2 = -times(p_->mass_b, y1 + sc * z1);
        x.resize(2 * n);
        x.head(n) = z1;
        x.tail(n) = mass_solver().solve(r2);
    }

private:
    void solve(const ComplexVector& rhs, bool adjoint, ComplexVector& out) const
    {
        if (real_) {
            solve_real(real_lu_, adjoint, rhs, out);
        } else if (adjoint) {
            out = complex_lu_.adjoint().solve(rhs);
        } else {
            out = complex_lu_.solve(rhs);
        }
    }

    const Eigen::SimplicialLDLT<SparseComplex>& mass_solver() const
    {
        if (!mass_ready_) {
            mass_ldlt_.compute(p_->mass.cast<Complex>());
            if (mass_ldlt_.info() != Eigen::Success) {
                throw FactorizationError("mass matrix factorization failed");
            }
            mass_ready_ = true;
        }
        return mass_ldlt_;
    }

    const PencilMatrices* p_;
    Complex shift_;
    bool real_;
    // Transposed solves are non-const in Eigen.
    mutable Eigen::SparseLU<SparseReal> real_lu_;
    mutable Eigen::SparseLU<SparseComplex> complex_lu_;
    mutable Eigen::SimplicialLDLT<SparseComplex> mass_ldlt_;
    mutable bool mass_ready_ = false;
};

}  // namespace

// ---------------------------------------------------------------------------
// Krylov-Schur

RitzPairs krylov_schur(const LinearOperator& op, int n, const ArnoldiOptions& options)
{
    if (n < 1 || options.nev < 1 || options.nev > n) {
        throw std::invalid_argument("krylov_schur: need 1 <= nev <= n");
    }
    const int nev = options.nev;
    int m = options.krylov_dim > 0 ? options.krylov_dim : std::max(20, 4 * nev);
    m = std::min(m, n);
    if (m <= nev && m < n) {
        m = std::min(n, nev + 1);
    }

    std::mt19937_64 rng(options.seed);
    ComplexMatrix V = ComplexMatrix::Zero(n, m + 1);
    ComplexMatrix H = ComplexMatrix::Zero(m + 1, m);
    V.col(0) = random_vector(n, rng).normalized();

    int k = 0;
    ComplexVector w;
    RitzPairs out;
    std::vector<Real> last_residuals;
    for (int restart = 0;; ++restart) {
        for (int j = k; j < m; ++j) {
            op(V.col(j), w);
            const ComplexVector h = orthogonalize(V, j + 1, w);
            H.col(j).head(j + 1) = h;
            Real beta = w.norm();
            if (j + 1 == n) {
                // The Krylov space is the whole space; the factorization is exact.
                H(j + 1, j) = 0.0;
                V.col(j + 1).setZero();
                continue;
            }
            if (beta <= 1e-14 * std::max(h.norm(), 1e-300)) {
                // Invariant subspace: continue with a fresh orthogonal direction.
                beta = 0.0;
                w = random_vector(n, rng);
                orthogonalize(V, j + 1, w);
                V.col(j + 1) = w.normalized();
            } else {
                V.col(j + 1) = w / beta;
            }
            H(j + 1, j) = beta;
        }

        Eigen::ComplexSchur<ComplexMatrix> schur(H.topRows(m));
        ComplexMatrix T = schur.matrixT();
        ComplexMatrix U = schur.matrixU();
        for (int p = 0; p < m; ++p) {
            int best = p;
            for (int q = p + 1; q < m; ++q) {
                if (std::abs(T(q, q)) > std::abs(T(best, best))) {
                    best = q;
                }
            }
            for (int q = best; q > p; --q) {
                swap_schur(T, U, q - 1);
            }
        }

        const Eigen::RowVectorXcd b = H.row(m) * U;
        bool converged = true;
        last_residuals.assign(static_cast<std::size_t>(nev), 0.0);
        std::vector<ComplexVector> ys;
        for (int i = 0; i < nev; ++i) {
            ys.push_back(triangular_eigenvector(T, i));
            const Real res = std::abs((b * ys.back()).value());
            last_residuals[static_cast<std::size_t>(i)] = res;
            if (res > options.tol * std::max(std::abs(T(i, i)), kEps)) {
                converged = false;
            }
        }

        if (converged) {
            out.restarts = restart;
            out.vectors.resize(n, nev);
            for (int i = 0; i < nev; ++i) {
                out.values.push_back(T(i, i));
                out.vectors.col(i) = (V.leftCols(m) * (U * ys[static_cast<std::size_t>(i)])).normalized();
            }
            out.residuals = last_residuals;
            return out;
        }
        if (restart >= options.max_restarts) {
            std::ostringstream msg;
            msg << "Arnoldi did not converge after " << restart << " restarts; residuals:";
            for (Real r : last_residuals) {
                msg << ' ' << r;
            }
            throw SolverError(msg.str());
        }

        const int p = std::min(m - 1, nev + (m - nev) / 2);
        const ComplexMatrix kept = V.leftCols(m) * U.leftCols(p);
        V.leftCols(p) = kept;
        V.col(p) = V.col(m);
        H.setZero();
        H.topLeftCorner(p, p) = T.topLeftCorner(p, p).triangularView<Eigen::Upper>();
        H.row(p).head(p) = b.head(p);
        k = p;
    }
}

// ---------------------------------------------------------------------------
// Transforms and solver

std::unique_ptr<SpectralTransform> make_general_transform(const SparseReal& A, const SparseReal& B,
                                                          Complex shift)
{
    return std::make_unique<GeneralTransform>(A, B, shift);
}

std::unique_ptr<SpectralTransform> make_pencil_transform(const PencilMatrices& pencil, Complex shift)
{
    return std::make_unique<PencilTransform>(pencil, shift);
}

std::pair<Real, Real> pencil_residual(const SparseReal& A, const SparseReal& B, Complex lambda,
                                      const ComplexVector& x)
{
    const ComplexVector r = times(A, x) - lambda * times(B, x);
    const Real xn = x.norm();
    const Real res = r.norm() / xn;
    const Real scale = norm_one(A) + std::abs(lambda) * norm_one(B);
    return {res, res / scale};
}

PencilEigensolver::PencilEigensolver(const PencilMatrices& pencil, Complex shift, SolveOptions options)
    : A_(&pencil.A), B_(&pencil.B), options_(options)
{
    factorize([&pencil](Complex s) { return make_pencil_transform(pencil, s); }, shift);
}

PencilEigensolver::PencilEigensolver(const SparseReal& A, const SparseReal& B, Complex shift,
                                     SolveOptions options)
    : A_(&A), B_(&B), options_(options)
{
    factorize([&A, &B](Complex s) { return make_general_transform(A, B, s); }, shift);
}

void PencilEigensolver::factorize(const std::function<std::unique_ptr<SpectralTransform>(Complex)>& make,
                                  Complex shift)
{
    norm_a_ = norm_one(*A_);
    norm_b_ = norm_one(*B_);
    Complex s = shift;
    std::string last_error;
    const int tries = std::max(1, options_.max_shift_tries);
    for (attempts_ = 1; attempts_ <= tries; ++attempts_) {
        try {
            transform_ = make(s);
            return;
        } catch (const FactorizationError& e) {
            last_error = e.what();
            s *= 1.0 + options_.shift_perturbation;
            if (s == Complex{}) {
                s = options_.shift_perturbation;
            }
        }
    }
    throw FactorizationError("factorization failed after " + std::to_string(tries) +
                             " shift perturbations: " + last_error);
}

std::vector<RawEigenPair> PencilEigensolver::solve() const
{
    const int n = transform_->size();
    ArnoldiOptions ao;
    ao.nev = std::min(options_.count, n);
    ao.krylov_dim = options_.krylov_dim;
    ao.tol = options_.tol;
    ao.max_restarts = options_.max_restarts;
    const SpectralTransform& t = *transform_;
    const RitzPairs ritz =
        krylov_schur([&t](const ComplexVector& y, ComplexVector& x) { t.apply(y, x); }, n, ao);
    std::vector<RawEigenPair> out;
    for (std::size_t i = 0; i < ritz.values.size(); ++i) {
        RawEigenPair pair;
        pair.lambda = t.shift() + 1.0 / ritz.values[i];
        pair.x = ritz.vectors.col(static_cast<Eigen::Index>(i));
        std::tie(pair.residual, pair.backward_error) = pencil_residual(*A_, *B_, pair.lambda, pair.x);
        out.push_back(std::move(pair));
    }
    return out;
}

DualVector PencilEigensolver::solve_dual(Complex lambda) const
{
    const int n = transform_->size();
    const SpectralTransform& t = *transform_;
    // Conjugate pairs are equidistant from a real shift, so the adjoint run may
    // keep the other member of a pair at the edge of the window; widen it.
    RitzPairs ritz;
    std::size_t best = 0;
    Real best_dist = std::numeric_limits<Real>::infinity();
    for (int nev = options_.count + 1;; nev *= 2) {
        ArnoldiOptions ao;
        ao.nev = std::min(nev, n);
        ao.krylov_dim = options_.krylov_dim > 0 ? std::max(options_.krylov_dim, std::min(2 * ao.nev + 1, n)) : 0;
        ao.tol = options_.tol;
        ao.max_restarts = options_.max_restarts;
        ritz = krylov_schur([&t](const ComplexVector& y, ComplexVector& x) { t.apply_adjoint(y, x); }, n, ao);

        // theta* = 1 / (conj(lambda) - conj(s)), so lambda = s + 1 / conj(theta*).
        best_dist = std::numeric_limits<Real>::infinity();
        for (std::size_t i = 0; i < ritz.values.size(); ++i) {
            const Complex candidate = t.shift() + 1.0 / std::conj(ritz.values[i]);
            const Real dist = std::abs(candidate - lambda);
            if (dist < best_dist) {
                best_dist = dist;
                best = i;
            }
        }
        if (best_dist <= 1e-6 * std::max(1.0, std::abs(lambda)) || ao.nev == n || nev > 4 * (options_.count + 1)) {
            break;
        }
    }
    if (best_dist > 1e-6 * std::max(1.0, std::abs(lambda))) {
        throw SolverError("adjoint Arnoldi found no eigenvalue matching " + describe(lambda));
    }
    DualVector dual;
    dual.lambda_star = std::conj(t.shift() + 1.0 / std::conj(ritz.values[best]));
    dual.y = ritz.vectors.col(static_cast<Eigen::Index>(best));
    const ComplexVector r =
        times_transpose(*A_, dual.y) - dual.lambda_star * times_transpose(*B_, dual.y);
    dual.residual = r.norm() / dual.y.norm();
    dual.backward_error = dual.residual / (norm_a_ + std::abs(dual.lambda_star) * norm_b_);
    return dual;
}

std::vector<RawEigenPair> solve_pencil(const PencilMatrices& pencil, Complex target_shift,
                                       const SolveOptions& options)
{
    return PencilEigensolver(pencil, target_shift, options).solve();
}

DualVector solve_dual(const PencilMatrices& pencil, Complex lambda, Complex shift, const SolveOptions& options)
{
    return PencilEigensolver(pencil, shift, options).solve_dual(lambda);
}

// ---------------------------------------------------------------------------
// Normalization

ComplexVector EigenPair::stacked() const
{
    const auto n = u.coefficients().size();
    ComplexVector x(2 * n);
    x.head(n) = u.coefficients();
    x.tail(n) = omega.coefficients();
    return x;
}

ComplexVector EigenPair::stacked_dual() const
{
    const auto n = u_star.coefficients().size();
    ComplexVector x(2 * n);
    x.head(n) = u_star.coefficients();
    x.tail(n) = omega_star.coefficients();
    return x;
}

std::vector<EigenPair> normalize_and_sort(const std::vector<RawEigenPair>& raw, const PencilMatrices& pencil,
                                          const FeSpace& space)
{
    const int n = pencil.num_free;
    std::vector<EigenPair> out;
    for (const RawEigenPair& r : raw) {
        ComplexVector x = r.x;
        Eigen::Index imax = 0;
        x.head(n).cwiseAbs().maxCoeff(&imax);
        const Complex pivot = x[imax];
        const Real scale = norm_h(pencil, x);
        if (scale == 0.0 || pivot == Complex{}) {
            throw SolverError("cannot normalize a zero eigenvector");
        }
        x *= (std::abs(pivot) / pivot) / scale;
        x[imax] = Complex(x[imax].real(), 0.0);
        EigenPair p{
            .lambda = r.lambda,
            .k = std::sqrt(r.lambda),
            .u = FeFunction(space, x.head(n)),
            .omega = FeFunction(space, x.tail(n)),
            .residual = r.residual,
            .backward_error = r.backward_error,
            .has_dual = false,
            .lambda_star = {},
            .u_star = FeFunction::zero(space),
            .omega_star = FeFunction::zero(space),
            .dual_residual = 0.0,
            .dual_backward_error = 0.0,
            .b_pairing = {},
        };
        out.push_back(std::move(p));
    }
    std::stable_sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) {
        if (a.k.real() != b.k.real()) {
            return a.k.real() < b.k.real();
        }
        return a.k.imag() > b.k.imag();
    });
    return out;
}

void attach_dual(EigenPair& pair, const DualVector& dual, const PencilMatrices& pencil)
{
    const int n = pencil.num_free;
    const ComplexVector x = pair.stacked();
    const ComplexVector& y = dual.y;
    // Projection coefficient A_h(x, y) / A_h(y, y) with A_h(x, y) = y^H A x.
    const Complex axy = sesquilinear(pencil.A, y, x);
    const Real ayy = sesquilinear(pencil.A, y, y).real();
    if (std::abs(axy) == 0.0 || ayy <= 0.0) {
        throw SolverError("dual eigenvector is A_h-orthogonal to the primal eigenvector");
    }
    ComplexVector z = (axy / ayy) * y;
    z /= norm_h(pencil, z);
    const FeSpace& space = pair.u.space();
    pair.has_dual = true;
    pair.lambda_star = dual.lambda_star;
    pair.u_star = FeFunction(space, z.head(n));
    pair.omega_star = FeFunction(space, z.tail(n));
    const auto [res, backward] = [&] {
        const ComplexVector r = times_transpose(pencil.A, z) - dual.lambda_star * times_transpose(pencil.B, z);
        const Real rn = r.norm() / z.norm();
        return std::pair{rn, rn / (norm_one(pencil.A) + std::abs(dual.lambda_star) * norm_one(pencil.B))};
    }();
    pair.dual_residual = res;
    pair.dual_backward_error = backward;
    pair.b_pairing = sesquilinear(pencil.B, z, x);
}

}  // namespace c0ipg
