#include "c0ipg/space.hpp"

#include <stdexcept>
#include <string>

#include "c0ipg/coefficients.hpp"
#include "c0ipg/quadrature.hpp"

namespace c0ipg {

namespace {

// Falling factorial p (p-1) ... (p-a+1).
Real falling(int p, int a)
{
    Real r = 1.0;
    for (int i = 0; i < a; ++i) {
        r *= static_cast<Real>(p - i);
    }
    return r;
}

Real ipow(Real x, int p)
{
    Real r = 1.0;
    for (int i = 0; i < p; ++i) {
        r *= x;
    }
    return r;
}

// d^a/dxi^a d^b/deta^b of xi^p eta^q.
Real monomial_derivative(Real xi, Real eta, int p, int q, int a, int b)
{
    if (a > p || b > q) {
        return 0.0;
    }
    return falling(p, a) * falling(q, b) * ipow(xi, p - a) * ipow(eta, q - b);
}

constexpr std::array<std::array<int, 2>, 10> kDerivativeOrders = {
    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}}};

}  // namespace

// ---------------------------------------------------------------------------
// ReferenceBasis

ReferenceBasis::ReferenceBasis(int degree) : degree_(degree)
{
    if (degree < 2 || degree > 3) {
        throw std::invalid_argument("ReferenceBasis: degree must be 2 or 3, got " +
                                    std::to_string(degree));
    }
    const Real m = degree;
    const std::array<Point, 3> corner = {Point{0.0, 0.0}, Point{1.0, 0.0}, Point{0.0, 1.0}};
    for (const auto& c : corner) {
        nodes_.push_back(c);
    }
    for (int k = 0; k < 3; ++k) {
        const Point a = corner[static_cast<std::size_t>(k)];
        const Point b = corner[static_cast<std::size_t>((k + 1) % 3)];
        for (int i = 1; i < degree; ++i) {
            nodes_.push_back(a + (i / m) * (b - a));
        }
    }
    for (int j = 1; j < degree; ++j) {
        for (int i = 1; i + j < degree; ++i) {
            nodes_.push_back({i / m, j / m});
        }
    }
    for (int d = 0; d <= degree; ++d) {
        for (int q = 0; q <= d; ++q) {
            exponents_.push_back({d - q, q});
        }
    }
    const auto n = static_cast<Eigen::Index>(nodes_.size());
    RealMatrix vandermonde(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& e = exponents_[static_cast<std::size_t>(k)];
            vandermonde(i, k) = ipow(nodes_[static_cast<std::size_t>(i)].x, e[0]) *
                                ipow(nodes_[static_cast<std::size_t>(i)].y, e[1]);
        }
    }
    // V C = I: column i of C holds the monomial coefficients of basis i.
    coeffs_ = vandermonde.fullPivLu().inverse();
}

void ReferenceBasis::evaluate(Point ref, LocalJets& out) const
{
    const int n = size();
    std::array<std::array<Real, 10>, kMaxLocalDofs> mono{};
    for (int k = 0; k < n; ++k) {
        const auto& e = exponents_[static_cast<std::size_t>(k)];
        for (std::size_t d = 0; d < kDerivativeOrders.size(); ++d) {
            mono[static_cast<std::size_t>(k)][d] =
                monomial_derivative(ref.x, ref.y, e[0], e[1], kDerivativeOrders[d][0], kDerivativeOrders[d][1]);
        }
    }
    for (int i = 0; i < n; ++i) {
        std::array<Real, 10> acc{};
        for (int k = 0; k < n; ++k) {
            const Real c = coeffs_(k, i);
            if (c == 0.0) {
                continue;
            }
            for (std::size_t d = 0; d < acc.size(); ++d) {
                acc[d] += c * mono[static_cast<std::size_t>(k)][d];
            }
        }
        BasisJet& j = out[static_cast<std::size_t>(i)];
        j.value = acc[0];
        j.grad = {acc[1], acc[2]};
        j.hess = {acc[3], acc[4], acc[5]};
        j.third = {acc[6], acc[7], acc[8], acc[9]};
    }
}

// ---------------------------------------------------------------------------
// ElementMap

ElementMap ElementMap::from_corners(const std::array<Point, 3>& p)
{
    ElementMap map;
    map.origin = p[0];
    map.jacobian << p[1].x - p[0].x, p[2].x - p[0].x, p[1].y - p[0].y, p[2].y - p[0].y;
    map.det = map.jacobian.determinant();
    map.inverse = map.jacobian.inverse();
    return map;
}

Point ElementMap::to_physical(Point ref) const
{
    return {origin.x + jacobian(0, 0) * ref.x + jacobian(0, 1) * ref.y,
            origin.y + jacobian(1, 0) * ref.x + jacobian(1, 1) * ref.y};
}

Point ElementMap::to_reference(Point x) const
{
    const Point d = x - origin;
    return {inverse(0, 0) * d.x + inverse(0, 1) * d.y, inverse(1, 0) * d.x + inverse(1, 1) * d.y};
}

void ElementMap::transform(const LocalJets& ref, LocalJets& phys, int count) const
{
    // d/dx_a = sum_alpha G(alpha, a) d/dxi_alpha with G = J^{-1}.
    const auto& g = inverse;
    for (int i = 0; i < count; ++i) {
        const BasisJet& r = ref[static_cast<std::size_t>(i)];
        BasisJet& p = phys[static_cast<std::size_t>(i)];
        p.value = r.value;
        for (int a = 0; a < 2; ++a) {
            p.grad[static_cast<std::size_t>(a)] = g(0, a) * r.grad[0] + g(1, a) * r.grad[1];
        }
        // Symmetric storage: index = number of y-directions.
        constexpr std::array<std::array<int, 2>, 3> h_idx = {{{0, 0}, {0, 1}, {1, 1}}};
        for (std::size_t s = 0; s < 3; ++s) {
            const int a = h_idx[s][0];
            const int b = h_idx[s][1];
            Real acc = 0.0;
            for (int al = 0; al < 2; ++al) {
                for (int be = 0; be < 2; ++be) {
                    acc += g(al, a) * g(be, b) * r.hess[static_cast<std::size_t>(al + be)];
                }
            }
            p.hess[s] = acc;
        }
        constexpr std::array<std::array<int, 3>, 4> t_idx = {{{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 1, 1}}};
        for (std::size_t s = 0; s < 4; ++s) {
            const int a = t_idx[s][0];
            const int b = t_idx[s][1];
            const int c = t_idx[s][2];
            Real acc = 0.0;
            for (int al = 0; al < 2; ++al) {
                for (int be = 0; be < 2; ++be) {
                    for (int ga = 0; ga < 2; ++ga) {
                        acc += g(al, a) * g(be, b) * g(ga, c) *
                               r.third[static_cast<std::size_t>(al + be + ga)];
                    }
                }
            }
            p.third[s] = acc;
        }
    }
}

// ---------------------------------------------------------------------------
// FeSpace

FeSpace::FeSpace(const Mesh& mesh, int degree) : mesh_(&mesh), degree_(degree), basis_(degree)
{
    const int m = degree;
    const int nloc = basis_.size();
    const int nv = mesh.num_vertices();
    const int nf = mesh.num_faces();
    const int nt = mesh.num_triangles();
    const int per_edge = m - 1;
    const int per_cell = nloc - 3 - 3 * per_edge;
    const int total = nv + nf * per_edge + nt * per_cell;

    dof_points_.resize(static_cast<std::size_t>(total));
    local_dofs_.resize(static_cast<std::size_t>(nt * nloc));
    maps_.reserve(static_cast<std::size_t>(nt));

    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangle(t);
        maps_.push_back(ElementMap::from_corners(mesh.corners(t)));
        int* dofs = &local_dofs_[static_cast<std::size_t>(t * nloc)];
        int slot = 0;
        for (int k = 0; k < 3; ++k) {
            dofs[slot++] = tri.v[static_cast<std::size_t>(k)];
        }
        for (int k = 0; k < 3; ++k) {
            const int f = mesh.triangle_faces(t)[static_cast<std::size_t>(k)];
            const bool forward = mesh.face(f).vertices[0] == tri.v[static_cast<std::size_t>(k)];
            for (int i = 1; i < m; ++i) {
                const int pos = forward ? i - 1 : per_edge - i;
                dofs[slot++] = nv + f * per_edge + pos;
            }
        }
        for (int i = 0; i < per_cell; ++i) {
            dofs[slot++] = nv + nf * per_edge + t * per_cell + i;
        }
        for (int i = 0; i < nloc; ++i) {
            dof_points_[static_cast<std::size_t>(dofs[i])] =
                maps_.back().to_physical(basis_.nodes()[static_cast<std::size_t>(i)]);
        }
    }

    std::vector<char> boundary(static_cast<std::size_t>(total), 0);
    for (int f = 0; f < nf; ++f) {
        const Face& face = mesh.face(f);
        if (face.is_interior()) {
            continue;
        }
        boundary[static_cast<std::size_t>(face.vertices[0])] = 1;
        boundary[static_cast<std::size_t>(face.vertices[1])] = 1;
        for (int i = 0; i < per_edge; ++i) {
            boundary[static_cast<std::size_t>(nv + f * per_edge + i)] = 1;
        }
    }
    free_index_.assign(static_cast<std::size_t>(total), -1);
    for (int g = 0; g < total; ++g) {
        if (boundary[static_cast<std::size_t>(g)] == 0) {
            free_index_[static_cast<std::size_t>(g)] = num_free_++;
        }
    }
    local_free_.resize(local_dofs_.size());
    for (std::size_t i = 0; i < local_dofs_.size(); ++i) {
        local_free_[i] = free_index_[static_cast<std::size_t>(local_dofs_[i])];
    }

    jet_cache_.resize(kMaxTriangleRuleDegree + 1);
    for (int d = 1; d <= kMaxTriangleRuleDegree; ++d) {
        const TriangleRule& rule = rule_for_degree(d);
        auto& jets = jet_cache_[static_cast<std::size_t>(d)];
        jets.resize(rule.size());
        for (std::size_t q = 0; q < rule.size(); ++q) {
            basis_.evaluate(rule.points[q], jets[q]);
        }
    }
}

std::span<const int> FeSpace::local_dofs(int t) const
{
    const auto n = static_cast<std::size_t>(local_size());
    return {local_dofs_.data() + static_cast<std::size_t>(t) * n, n};
}

std::span<const int> FeSpace::local_free(int t) const
{
    const auto n = static_cast<std::size_t>(local_size());
    return {local_free_.data() + static_cast<std::size_t>(t) * n, n};
}

void FeSpace::basis_jets(int t, Point x, LocalJets& out) const
{
    LocalJets ref;
    const ElementMap& map = element_map(t);
    basis_.evaluate(map.to_reference(x), ref);
    map.transform(ref, out, local_size());
}

const std::vector<LocalJets>& FeSpace::reference_jets(int rule_degree) const
{
    if (rule_degree < 1 || rule_degree > kMaxTriangleRuleDegree) {
        throw std::invalid_argument("reference_jets: rule degree out of range");
    }
    return jet_cache_[static_cast<std::size_t>(rule_degree)];
}

// ---------------------------------------------------------------------------
// FeFunction

FeFunction::FeFunction(const FeSpace& space, ComplexVector coefficients)
    : space_(&space), coeffs_(std::move(coefficients))
{
    if (coeffs_.size() != space.num_free_dofs()) {
        throw std::invalid_argument("FeFunction: coefficient vector length " +
                                    std::to_string(coeffs_.size()) + " does not match " +
                                    std::to_string(space.num_free_dofs()) + " free DOFs");
    }
}

FeFunction FeFunction::zero(const FeSpace& space)
{
    return FeFunction(space, ComplexVector::Zero(space.num_free_dofs()));
}

void FeFunction::local_coefficients(int t, std::array<Complex, kMaxLocalDofs>& out) const
{
    const auto free = space_->local_free(t);
    for (std::size_t i = 0; i < free.size(); ++i) {
        out[i] = free[i] >= 0 ? coeffs_[free[i]] : Complex{};
    }
}

FieldJet combine(const LocalJets& jets, const std::array<Complex, kMaxLocalDofs>& coeffs, int count)
{
    FieldJet r;
    for (int i = 0; i < count; ++i) {
        const Complex c = coeffs[static_cast<std::size_t>(i)];
        if (c == Complex{}) {
            continue;
        }
        const BasisJet& j = jets[static_cast<std::size_t>(i)];
        r.value += c * j.value;
        for (std::size_t a = 0; a < 2; ++a) {
            r.grad[a] += c * j.grad[a];
        }
        for (std::size_t a = 0; a < 3; ++a) {
            r.hess[a] += c * j.hess[a];
        }
        for (std::size_t a = 0; a < 4; ++a) {
            r.third[a] += c * j.third[a];
        }
    }
    return r;
}

FieldJet FeFunction::jet(int t, Point x) const
{
    LocalJets jets;
    space_->basis_jets(t, x, jets);
    std::array<Complex, kMaxLocalDofs> local{};
    local_coefficients(t, local);
    return combine(jets, local, space_->local_size());
}

FeFunction interpolate(const FeSpace& space, const std::function<Complex(Point)>& f)
{
    ComplexVector coeffs(space.num_free_dofs());
    for (int g = 0; g < space.num_dofs(); ++g) {
        const int i = space.free_index(g);
        if (i >= 0) {
            coeffs[i] = f(space.dof_point(g));
        }
    }
    return FeFunction(space, std::move(coeffs));
}

std::vector<FieldJet> eval_derivatives(const FeFunction& fn, int t, std::span<const Point> points)
{
    const FeSpace& space = fn.space();
    if (t < 0 || t >= space.mesh().num_triangles()) {
        throw std::out_of_range("eval_derivatives: triangle id out of range");
    }
    constexpr Real kTol = 1e-12;
    std::vector<FieldJet> out;
    out.reserve(points.size());
    for (const Point& x : points) {
        const Point r = space.element_map(t).to_reference(x);
        if (r.x < -kTol || r.y < -kTol || r.x + r.y > 1.0 + kTol) {
            throw std::out_of_range("eval_derivatives: point (" + std::to_string(x.x) + ", " +
                                    std::to_string(x.y) + ") lies outside triangle " +
                                    std::to_string(t));
        }
        out.push_back(fn.jet(t, x));
    }
    return out;
}

FaceTrace face_trace_jump(const FeFunction& fn, int face_id, TraceQuantity what,
                          const ProblemCoefficients* coeffs, bool flip)
{
    const FeSpace& space = fn.space();
    const Mesh& mesh = space.mesh();
    const Face& face = mesh.face(face_id);
    if (what == TraceQuantity::kCoefficientLaplacian && coeffs == nullptr) {
        throw std::invalid_argument("face_trace_jump: coefficient Laplacian needs coefficients");
    }
    Point normal = face.normal;
    const int minus = face.minus;
    const int plus = face.plus;
    if (flip) {
        normal = -1.0 * normal;
    }

    auto quantity = [&](const FieldJet& j, Point x) -> Complex {
        switch (what) {
        case TraceQuantity::kNormalDerivative:
            return j.normal_derivative(normal);
        case TraceQuantity::kSecondNormalDerivative:
            return j.second_normal_derivative(normal);
        case TraceQuantity::kLaplacian:
            return j.laplacian();
        case TraceQuantity::kCoefficientLaplacian:
            return coeffs->at(x).a * j.laplacian();
        }
        return {};
    };

    FaceTrace trace;
    for (const auto& qp : face_quadrature_points(mesh, face, space.face_points())) {
        const Complex inside = quantity(fn.jet(minus, qp.point), qp.point);
        trace.points.push_back(qp.point);
        trace.weights.push_back(qp.weight);
        if (face.is_interior()) {
            const Complex outside = quantity(fn.jet(plus, qp.point), qp.point);
            trace.jump.push_back(outside - inside);
            trace.average.push_back(0.5 * (inside + outside));
        } else {
            trace.jump.push_back(-inside);
            trace.average.push_back(inside);
        }
    }
    return trace;
}

}  // namespace c0ipg
