#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <c0ipg/coefficients.hpp>
#include <c0ipg/quadrature.hpp>

#include "test_support.hpp"

using namespace c0ipg;
using c0ipg::testing::all_nodes_free;
using c0ipg::testing::diamond;
using c0ipg::testing::triangle_near;
using c0ipg::testing::unit_square;

namespace {

std::vector<Point> element_points(const FeSpace& space, int t, int degree)
{
    std::vector<Point> pts;
    const TriangleRule& rule = rule_for_degree(degree);
    for (const Point& r : rule.points) {
        pts.push_back(space.element_map(t).to_physical(r));
    }
    return pts;
}

// True when no Lagrange node of t is constrained.
Real l2_error(const FeFunction& fn, const std::function<Real(Point)>& exact)
{
    const FeSpace& space = fn.space();
    const TriangleRule& rule = rule_for_degree(10);
    Real sum = 0.0;
    for (int t = 0; t < space.mesh().num_triangles(); ++t) {
        const ElementMap& map = space.element_map(t);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point x = map.to_physical(rule.points[q]);
            sum += rule.weights[q] * std::abs(map.det) * std::norm(fn.jet(t, x).value - exact(x));
        }
    }
    return std::sqrt(sum);
}

}  // namespace

TEST(FeSpace, LocalSizeAndDofCounts)
{
    const Mesh mesh = unit_square(4);
    const FeSpace p2(mesh, 2);
    const FeSpace p3(mesh, 3);
    EXPECT_EQ(p2.local_size(), 6);
    EXPECT_EQ(p3.local_size(), 10);
    EXPECT_EQ(p2.num_dofs(), 9 * 9);
    EXPECT_EQ(p2.num_free_dofs(), 7 * 7);
    EXPECT_EQ(p3.num_dofs(), 13 * 13);
    EXPECT_EQ(p3.num_free_dofs(), 11 * 11);
    EXPECT_THROW(FeSpace(mesh, 4), std::invalid_argument);
}

TEST(FeSpace, BoundaryDofsLieOnBoundary)
{
    const Mesh mesh = make_uniform(Domain::kLShape, std::numbers::sqrt2 / 4);
    const FeSpace space(mesh, 3);
    for (int g = 0; g < space.num_dofs(); ++g) {
        const Point p = space.dof_point(g);
        const bool outer = std::abs(std::abs(p.x) - 1.0) < 1e-14 || std::abs(std::abs(p.y) - 1.0) < 1e-14;
        const bool reentrant = (std::abs(p.x) < 1e-14 && p.y <= 1e-14) || (std::abs(p.y) < 1e-14 && p.x >= -1e-14);
        EXPECT_EQ(space.is_boundary_dof(g), outer || reentrant) << p.x << ", " << p.y;
    }
}

TEST(FeSpace, SharedNodesMapToSameDof)
{
    const Mesh mesh = make_uniform(Domain::kSlit, std::numbers::sqrt2 / 8);
    const FeSpace space(mesh, 3);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto dofs = space.local_dofs(t);
        const ElementMap& map = space.element_map(t);
        for (std::size_t i = 0; i < dofs.size(); ++i) {
            const Point x = map.to_physical(space.basis().nodes()[i]);
            const Point p = space.dof_point(dofs[i]);
            EXPECT_NEAR(x.x, p.x, 1e-14);
            EXPECT_NEAR(x.y, p.y, 1e-14);
        }
    }
}

TEST(Interpolate, ZeroFunction)
{
    const Mesh mesh = unit_square(4);
    const FeSpace space(mesh, 2);
    const FeFunction fn = interpolate(space, [](Point) { return Complex{}; });
    EXPECT_EQ(fn.coefficients().norm(), 0.0);
}

TEST(Interpolate, ReproducesPolynomialsOnUnconstrainedElements)
{
    const Mesh mesh = make_uniform(Domain::kUnitSquare, std::numbers::sqrt2 / 4);
    for (int m : {2, 3}) {
        // Boundary nodes are zeroed, so only elements without constrained nodes
        // reproduce the polynomial.
        const auto p = [m](Point x) {
            return m == 2 ? x.x * (1 - x.x) + x.y : x.x * (1 - x.x) * (1 - 2 * x.y) + x.x * x.y;
        };
        const FeSpace space(mesh, m);
        const FeFunction fn = interpolate(space, [&](Point x) { return Complex(p(x)); });
        int checked = 0;
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            if (!all_nodes_free(space, t)) {
                continue;
            }
            ++checked;
            for (const Point& x : element_points(space, t, 6)) {
                EXPECT_NEAR(fn.jet(t, x).value.real(), p(x), 1e-12);
            }
        }
        EXPECT_GT(checked, 0);
    }
}

TEST(Interpolate, SineErrorDropsEightfold)
{
    const auto f = [](Point x) { return std::sin(std::numbers::pi * x.x) * std::sin(std::numbers::pi * x.y); };
    const Mesh coarse = unit_square(8);
    const Mesh fine = unit_square(16);
    const FeSpace sc(coarse, 2);
    const FeSpace sf(fine, 2);
    const Real ec = l2_error(interpolate(sc, [&](Point x) { return Complex(f(x)); }), f);
    const Real ef = l2_error(interpolate(sf, [&](Point x) { return Complex(f(x)); }), f);
    EXPECT_GT(ec / ef, 7.0);
    EXPECT_LT(ec / ef, 9.0);
}

TEST(EvalDerivatives, QuadraticHessian)
{
    const Mesh mesh = unit_square(8);
    const FeSpace space(mesh, 2);
    const FeFunction fn = interpolate(space, [](Point x) { return Complex(x.x * x.x); });
    const int t = triangle_near(mesh, {0.5, 0.5});
    ASSERT_TRUE(all_nodes_free(space, t));
    const auto pts = element_points(space, t, 4);
    for (const FieldJet& j : eval_derivatives(fn, t, pts)) {
        EXPECT_NEAR(j.hess[0].real(), 2.0, 1e-10);
        EXPECT_NEAR(std::abs(j.hess[1]), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(j.hess[2]), 0.0, 1e-10);
    }
}

TEST(EvalDerivatives, ThirdDerivativesVanishForQuadratics)
{
    const Mesh mesh = unit_square(4);
    const FeSpace space(mesh, 2);
    const FeFunction fn(space, c0ipg::testing::random_vector(space.num_free_dofs(), 7));
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        for (const FieldJet& j : eval_derivatives(fn, t, element_points(space, t, 3))) {
            for (const Complex& d : j.third) {
                EXPECT_EQ(d, Complex{});
            }
        }
    }
}

TEST(EvalDerivatives, HarmonicCubic)
{
    const Mesh mesh = unit_square(8);
    const FeSpace space(mesh, 3);
    const FeFunction fn = interpolate(space, [](Point x) { return Complex(x.x * x.x * x.x - 3 * x.x * x.y * x.y); });
    int checked = 0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (!all_nodes_free(space, t)) {
            continue;
        }
        ++checked;
        for (const FieldJet& j : eval_derivatives(fn, t, element_points(space, t, 5))) {
            EXPECT_NEAR(std::abs(j.laplacian()), 0.0, 1e-9);
            EXPECT_NEAR(j.third[0].real(), 6.0, 1e-7);
            EXPECT_NEAR(j.third[2].real(), -6.0, 1e-7);
        }
    }
    EXPECT_GT(checked, 0);
}

TEST(EvalDerivatives, RejectsPointOutsideTriangle)
{
    const Mesh mesh = unit_square(2);
    const FeSpace space(mesh, 2);
    const FeFunction fn = FeFunction::zero(space);
    const std::vector<Point> far{{5.0, 5.0}};
    EXPECT_THROW(eval_derivatives(fn, 0, far), std::out_of_range);
    EXPECT_THROW(eval_derivatives(fn, 99, far), std::out_of_range);
}

TEST(FaceTrace, ContinuityAcrossInteriorFaces)
{
    const Mesh mesh = make_uniform(Domain::kSlit, std::numbers::sqrt2 / 8);
    for (int m : {2, 3}) {
        const FeSpace space(mesh, m);
        const FeFunction fn(space, c0ipg::testing::random_vector(space.num_free_dofs(), 11));
        for (const Face& f : mesh.faces()) {
            if (!f.is_interior()) {
                continue;
            }
            for (const auto& qp : face_quadrature_points(mesh, f, space.face_points())) {
                EXPECT_NEAR(std::abs(fn.jet(f.minus, qp.point).value - fn.jet(f.plus, qp.point).value), 0.0, 1e-12);
            }
        }
    }
}

TEST(FaceTrace, DiamondHandComputedJump)
{
    // The only free basis function sits at the origin. On the left triangle it
    // equals (1 + x)^2 - y^2 and on the right (1 - x)^2 - y^2.
    const Mesh mesh = diamond();
    const FeSpace space(mesh, 2);
    ASSERT_EQ(space.num_free_dofs(), 1);
    const FeFunction fn(space, ComplexVector::Ones(1));
    int interior = -1;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (mesh.face(f).is_interior()) {
            interior = f;
        }
    }
    ASSERT_GE(interior, 0);
    for (bool flip : {false, true}) {
        const FaceTrace nd = face_trace_jump(fn, interior, TraceQuantity::kNormalDerivative, nullptr, flip);
        const FaceTrace sn = face_trace_jump(fn, interior, TraceQuantity::kSecondNormalDerivative, nullptr, flip);
        const FaceTrace lap = face_trace_jump(fn, interior, TraceQuantity::kLaplacian, nullptr, flip);
        for (std::size_t q = 0; q < nd.points.size(); ++q) {
            EXPECT_NEAR(nd.jump[q].real(), flip ? 4.0 : -4.0, 1e-12);
            EXPECT_NEAR(nd.average[q].real(), 0.0, 1e-12);
            EXPECT_NEAR(sn.jump[q].real(), 0.0, 1e-12);
            EXPECT_NEAR(sn.average[q].real(), 2.0, 1e-12);
            EXPECT_NEAR(std::abs(lap.jump[q]), 0.0, 1e-12);
        }
    }
}

TEST(FaceTrace, FlipNegatesJumpAndKeepsEvenAverage)
{
    const Mesh mesh = make_uniform(Domain::kLShape, std::numbers::sqrt2 / 4);
    const FeSpace space(mesh, 3);
    const FeFunction fn(space, c0ipg::testing::random_vector(space.num_free_dofs(), 5));
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceTrace a = face_trace_jump(fn, f, TraceQuantity::kNormalDerivative);
        const FaceTrace b = face_trace_jump(fn, f, TraceQuantity::kNormalDerivative, nullptr, true);
        const FaceTrace c = face_trace_jump(fn, f, TraceQuantity::kSecondNormalDerivative);
        const FaceTrace d = face_trace_jump(fn, f, TraceQuantity::kSecondNormalDerivative, nullptr, true);
        for (std::size_t q = 0; q < a.points.size(); ++q) {
            EXPECT_NEAR(std::abs(a.jump[q] + b.jump[q]), 0.0, 1e-10);
            EXPECT_NEAR(std::abs(c.average[q] - d.average[q]), 0.0, 1e-10);
        }
    }
}

TEST(FaceTrace, JumpsVanishForGlobalPolynomial)
{
    const Mesh mesh = unit_square(8);
    const FeSpace space(mesh, 3);
    const auto p = [](Point x) { return Complex(1 + x.x - 2 * x.y + x.x * x.y + 3 * x.x * x.x * x.y - x.y * x.y * x.y); };
    const FeFunction fn = interpolate(space, p);
    ProblemCoefficients coeffs = builtin_coefficients("affine");
    int checked = 0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        if (!face.is_interior() || !all_nodes_free(space, face.minus) || !all_nodes_free(space, face.plus)) {
            continue;
        }
        ++checked;
        for (TraceQuantity what : {TraceQuantity::kNormalDerivative, TraceQuantity::kSecondNormalDerivative,
                                   TraceQuantity::kLaplacian, TraceQuantity::kCoefficientLaplacian}) {
            for (const Complex& j : face_trace_jump(fn, f, what, &coeffs).jump) {
                EXPECT_NEAR(std::abs(j), 0.0, 1e-10);
            }
        }
    }
    EXPECT_GT(checked, 50);
}

TEST(FaceTrace, BoundaryJumpIsMinusOutwardDerivative)
{
    const Mesh mesh = unit_square(4);
    const FeSpace space(mesh, 3);
    const FeFunction fn = interpolate(space, [](Point x) { return Complex(x.x * (1 - x.x) * x.y * (1 - x.y), x.x); });
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        if (face.is_interior()) {
            continue;
        }
        const FaceTrace tr = face_trace_jump(fn, f, TraceQuantity::kNormalDerivative);
        const auto jets = eval_derivatives(fn, face.minus, tr.points);
        for (std::size_t q = 0; q < tr.points.size(); ++q) {
            const Complex dn = jets[q].grad[0] * face.normal.x + jets[q].grad[1] * face.normal.y;
            EXPECT_NEAR(std::abs(tr.jump[q] + dn), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(tr.average[q] - dn), 0.0, 1e-12);
        }
    }
}

TEST(FaceTrace, CoefficientLaplacianNeedsCoefficients)
{
    const Mesh mesh = unit_square(2);
    const FeSpace space(mesh, 2);
    EXPECT_THROW(face_trace_jump(FeFunction::zero(space), 0, TraceQuantity::kCoefficientLaplacian),
                 std::invalid_argument);
}
