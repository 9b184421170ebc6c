#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "c0ipg/mesh.hpp"
#include "c0ipg/types.hpp"

namespace c0ipg {

class ProblemCoefficients;

/// Value and derivatives up to third order at a point.
///
/// Second derivatives are stored as (xx, xy, yy) and third derivatives as
/// (xxx, xxy, xyy, yyy).
template <typename S>
struct Jet {
    S value{};
    std::array<S, 2> grad{};
    std::array<S, 3> hess{};
    std::array<S, 4> third{};

    [[nodiscard]] S laplacian() const { return hess[0] + hess[2]; }
    [[nodiscard]] std::array<S, 2> grad_laplacian() const
    {
        return {third[0] + third[2], third[1] + third[3]};
    }
    [[nodiscard]] S normal_derivative(Point n) const { return grad[0] * n.x + grad[1] * n.y; }
    [[nodiscard]] S second_normal_derivative(Point n) const
    {
        return hess[0] * (n.x * n.x) + hess[1] * (2.0 * n.x * n.y) + hess[2] * (n.y * n.y);
    }
    [[nodiscard]] S normal_derivative_of_laplacian(Point n) const
    {
        const auto g = grad_laplacian();
        return g[0] * n.x + g[1] * n.y;
    }
};

using BasisJet = Jet<Real>;
using FieldJet = Jet<Complex>;

inline constexpr int kMaxLocalDofs = 10;
using LocalJets = std::array<BasisJet, kMaxLocalDofs>;

/// Lagrange basis of P_m on the reference triangle with equispaced nodes.
///
/// Node order: the three vertices, then m-1 nodes on each edge k from vertex
/// k to vertex k+1, then interior nodes.
class ReferenceBasis {
public:
    explicit ReferenceBasis(int degree);

    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] int size() const { return static_cast<int>(nodes_.size()); }
    [[nodiscard]] const std::vector<Point>& nodes() const { return nodes_; }

    /// Derivatives with respect to the reference coordinates.
    void evaluate(Point ref, LocalJets& out) const;

private:
    int degree_;
    std::vector<Point> nodes_;
    std::vector<std::array<int, 2>> exponents_;
    RealMatrix coeffs_;  // basis i = sum_k coeffs_(k, i) * monomial k
};

/// Affine map x = origin + J * ref from the reference triangle.
struct ElementMap {
    Point origin;
    Eigen::Matrix2d jacobian;
    Eigen::Matrix2d inverse;
    Real det = 0.0;

    static ElementMap from_corners(const std::array<Point, 3>& p);
    [[nodiscard]] Point to_physical(Point ref) const;
    [[nodiscard]] Point to_reference(Point x) const;
    /// Chain rule for reference jets; exact because the map is affine.
    void transform(const LocalJets& ref, LocalJets& phys, int count) const;
};

/// Continuous P_m Lagrange space with homogeneous Dirichlet constraint.
///
/// Holds a non-owning reference to the mesh, which must outlive the space.
class FeSpace {
public:
    FeSpace(const Mesh& mesh, int degree);
    FeSpace(Mesh&&, int) = delete;

    [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] int local_size() const { return basis_.size(); }
    [[nodiscard]] int num_dofs() const { return static_cast<int>(dof_points_.size()); }
    [[nodiscard]] int num_free_dofs() const { return num_free_; }
    [[nodiscard]] const ReferenceBasis& basis() const { return basis_; }

    [[nodiscard]] std::span<const int> local_dofs(int t) const;
    /// Free index of each local DOF of t, -1 for constrained DOFs.
    [[nodiscard]] std::span<const int> local_free(int t) const;
    [[nodiscard]] int free_index(int global) const { return free_index_[static_cast<std::size_t>(global)]; }
    [[nodiscard]] bool is_boundary_dof(int global) const { return free_index(global) < 0; }
    [[nodiscard]] Point dof_point(int global) const { return dof_points_[static_cast<std::size_t>(global)]; }
    [[nodiscard]] const ElementMap& element_map(int t) const { return maps_[static_cast<std::size_t>(t)]; }

    /// Number of Gauss points used on faces: ceil((2m + 3) / 2).
    [[nodiscard]] int face_points() const { return degree_ + 2; }

    /// Physical basis jets of triangle t at the physical point x.
    void basis_jets(int t, Point x, LocalJets& out) const;

    /// Reference jets at the points of rule_for_degree(d).
    [[nodiscard]] const std::vector<LocalJets>& reference_jets(int rule_degree) const;

private:
    const Mesh* mesh_;
    int degree_;
    ReferenceBasis basis_;
    std::vector<int> local_dofs_;
    std::vector<int> local_free_;
    std::vector<int> free_index_;
    std::vector<Point> dof_points_;
    std::vector<ElementMap> maps_;
    int num_free_ = 0;
    std::vector<std::vector<LocalJets>> jet_cache_;  // indexed by rule degree
};

/// Finite element function given by complex coefficients over the free DOFs.
/// Holds a non-owning reference to the space.
class FeFunction {
public:
    FeFunction(const FeSpace& space, ComplexVector coefficients);
    static FeFunction zero(const FeSpace& space);

    [[nodiscard]] const FeSpace& space() const { return *space_; }
    [[nodiscard]] const ComplexVector& coefficients() const { return coeffs_; }

    /// Local coefficients of triangle t (constrained DOFs are zero).
    void local_coefficients(int t, std::array<Complex, kMaxLocalDofs>& out) const;
    [[nodiscard]] FieldJet jet(int t, Point x) const;

private:
    const FeSpace* space_;
    ComplexVector coeffs_;
};

FieldJet combine(const LocalJets& jets, const std::array<Complex, kMaxLocalDofs>& coeffs, int count);

/// Lagrange nodal interpolant; constrained DOFs are set to zero.
FeFunction interpolate(const FeSpace& space, const std::function<Complex(Point)>& f);

/// Exact derivatives of fn on triangle t at physical points inside t.
/// Throws std::out_of_range for points outside the triangle.
std::vector<FieldJet> eval_derivatives(const FeFunction& fn, int t, std::span<const Point> points);

enum class TraceQuantity {
    kNormalDerivative,        ///< jump [[dv/dn]], average {{dv/dn}}
    kSecondNormalDerivative,  ///< jump and average of d2v/dn2
    kLaplacian,               ///< jump and average of lap v
    kCoefficientLaplacian,    ///< jump and average of (1/(n-1) - mu) lap v
};

struct FaceTrace {
    std::vector<Point> points;
    std::vector<Real> weights;
    std::vector<Complex> jump;
    std::vector<Complex> average;
};

/// Jump (plus side minus minus side) and average of a trace quantity at the
/// face Gauss points. On boundary faces the outside value is taken as zero, so
/// [[dv/dn]] = -n . grad v, and averages are one-sided. `flip` reverses the
/// normal and keeps the side labels, so odd-order jumps change sign.
FaceTrace face_trace_jump(const FeFunction& fn, int face, TraceQuantity what,
                          const ProblemCoefficients* coeffs = nullptr, bool flip = false);

}  // namespace c0ipg
