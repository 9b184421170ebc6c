#pragma once

#include <iosfwd>
#include <string>

#include "c0ipg/coefficients.hpp"
#include "c0ipg/space.hpp"
#include "c0ipg/types.hpp"

namespace c0ipg {

/// Sparse matrices of the discrete pencil over the free DOFs of S^h.
///
/// With N free scalar DOFs, unknowns are ordered (u, omega) and
///   A = [[a_h, 0], [0, M]],   B = [[K, -M_b], [M, 0]],
/// where entry (i, j) of every block is the form evaluated at
/// (trial phi_j, test phi_i). All blocks are real because n is real.
struct PencilMatrices {
    int num_free = 0;  ///< N
    SparseReal a_h;        ///< C0IPG form on S^h x S^h
    SparseReal stiffness;  ///< K: (grad(c phi_j), grad phi_i) + (grad phi_j, grad(b phi_i))
    SparseReal mass;       ///< M: (phi_j, phi_i)
    SparseReal mass_b;     ///< M_b: (phi_j, b phi_i)
    SparseReal A;          ///< 2N x 2N
    SparseReal B;          ///< 2N x 2N

    /// u-part of the mesh-dependent norm: broken H^2 norm plus the jump penalty.
    SparseReal norm_u;
    /// Additional u-part of the triple norm (face averages of lap u and d2u/dn2).
    SparseReal norm_triple_extra;

    [[nodiscard]] int size() const { return 2 * num_free; }
};

struct AssemblyOptions {
    /// Sum the face terms over boundary faces as well as interior ones.
    bool boundary_faces = true;
    /// Element quadrature degree; 0 selects 2m + 2.
    int element_degree = 0;
    /// Gauss points per face; 0 selects FeSpace::face_points().
    int face_points = 0;
};

PencilMatrices assemble_pencil(const FeSpace& space, const ProblemCoefficients& coeffs,
                               const AssemblyOptions& options = {});

/// Mesh-dependent norm of (u, omega) evaluated by quadrature.
Real norm_h(const FeFunction& u, const FeFunction& omega, const ProblemCoefficients& coeffs);
Real norm_h_triple(const FeFunction& u, const FeFunction& omega, const ProblemCoefficients& coeffs);

/// The same norms for a stacked coefficient vector x = (u, omega) via the
/// assembled norm matrices.
Real norm_h(const PencilMatrices& pencil, const ComplexVector& x);
Real norm_h_triple(const PencilMatrices& pencil, const ComplexVector& x);

/// x^H S y for a real sparse S.
Complex sesquilinear(const SparseReal& s, const ComplexVector& x, const ComplexVector& y);

/// Coordinate text format, one "i j re im" line per stored entry (0-based).
void dump_matrix(std::ostream& out, const SparseReal& matrix);
void dump_matrix(const std::string& path, const SparseReal& matrix);

}  // namespace c0ipg
