#include "c0ipg/assembly.hpp"

#include <fstream>
#include <ostream>
#include <vector>

#include "c0ipg/quadrature.hpp"

namespace c0ipg {

namespace {

using Triplets = std::vector<Eigen::Triplet<Real>>;

Real hess_inner(const BasisJet& p, const BasisJet& q)
{
    return p.hess[0] * q.hess[0] + 2.0 * p.hess[1] * q.hess[1] + p.hess[2] * q.hess[2];
}

Real grad_inner(const BasisJet& p, const BasisJet& q)
{
    return p.grad[0] * q.grad[0] + p.grad[1] * q.grad[1];
}

SparseReal build(int n, const Triplets& entries)
{
    SparseReal m(n, n);
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();
    return m;
}

// Traces of one local basis function on a face, already weighted for the
// jump and average definitions.
struct FaceBasisTrace {
    int free = -1;
    Real jump = 0.0;     // [[d phi / d gamma]]
    Real avg_a = 0.0;    // {{a lap phi}}
    Real avg_nn = 0.0;   // {{d2 phi / d gamma2}}
    Real avg_lap = 0.0;  // {{lap phi}}
};

struct Accumulators {
    Triplets a_h, stiffness, mass, mass_b, norm_u, norm_extra;
};

void assemble_elements(const FeSpace& space, const ProblemCoefficients& coeffs, int degree, Accumulators& acc)
{
    const TriangleRule& rule = rule_for_degree(degree);
    const auto& ref_jets = space.reference_jets(degree);
    const int nloc = space.local_size();
    const Real mu = coeffs.mu();
    const auto nq = rule.size();

    std::vector<LocalJets> jets(nq);
    std::vector<CoefficientSample> samples(nq);
    std::vector<Real> weights(nq);

    for (int t = 0; t < space.mesh().num_triangles(); ++t) {
        const ElementMap& map = space.element_map(t);
        const auto free = space.local_free(t);
        for (std::size_t q = 0; q < nq; ++q) {
            map.transform(ref_jets[q], jets[q], nloc);
            samples[q] = coeffs.at(map.to_physical(rule.points[q]));
            weights[q] = rule.weights[q] * std::abs(map.det);
        }
        for (int i = 0; i < nloc; ++i) {
            const int gi = free[static_cast<std::size_t>(i)];
            if (gi < 0) {
                continue;
            }
            for (int j = 0; j < nloc; ++j) {
                const int gj = free[static_cast<std::size_t>(j)];
                if (gj < 0) {
                    continue;
                }
                Real ah = 0.0;
                Real k = 0.0;
                Real m = 0.0;
                Real mb = 0.0;
                Real nu = 0.0;
                for (std::size_t q = 0; q < nq; ++q) {
                    const BasisJet& pi = jets[q][static_cast<std::size_t>(i)];
                    const BasisJet& pj = jets[q][static_cast<std::size_t>(j)];
                    const CoefficientSample& s = samples[q];
                    const Real w = weights[q];
                    const Real hh = hess_inner(pj, pi);
                    const Real gg = grad_inner(pj, pi);
                    const Real vv = pj.value * pi.value;
                    ah += w * (s.a * pj.laplacian() * pi.laplacian() + mu * hh);
                    // grad(c phi_j) . grad phi_i + grad phi_j . grad(b phi_i), grad b = grad c.
                    const Real gc_i = s.grad_c.x * pi.grad[0] + s.grad_c.y * pi.grad[1];
                    const Real gc_j = s.grad_c.x * pj.grad[0] + s.grad_c.y * pj.grad[1];
                    k += w * ((s.c + s.b) * gg + pj.value * gc_i + pi.value * gc_j);
                    m += w * vv;
                    mb += w * s.b * vv;
                    nu += w * (vv + gg + hh);
                }
                acc.a_h.emplace_back(gi, gj, ah);
                acc.stiffness.emplace_back(gi, gj, k);
                acc.mass.emplace_back(gi, gj, m);
                acc.mass_b.emplace_back(gi, gj, mb);
                acc.norm_u.emplace_back(gi, gj, nu);
            }
        }
    }
}

void assemble_faces(const FeSpace& space, const ProblemCoefficients& coeffs, bool boundary_faces,
                    int face_points, Accumulators& acc)
{
    const Mesh& mesh = space.mesh();
    const int nloc = space.local_size();
    const Real mu = coeffs.mu();
    const Real sigma = coeffs.sigma();
    LocalJets jets;
    std::vector<FaceBasisTrace> traces;

    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        if (!face.is_interior() && !boundary_faces) {
            continue;
        }
        const Real len = face.length;
        const Point n = face.normal;
        const int nsides = face.is_interior() ? 2 : 1;
        const Real avg_weight = face.is_interior() ? 0.5 : 1.0;

        for (const auto& qp : face_quadrature_points(mesh, face, face_points)) {
            const CoefficientSample s = coeffs.at(qp.point);
            traces.clear();
            for (int side = 0; side < nsides; ++side) {
                const int t = side == 0 ? face.minus : face.plus;
                // Jump is plus side minus minus side; outside a boundary face is zero.
                const Real sign = side == 0 ? -1.0 : 1.0;
                space.basis_jets(t, qp.point, jets);
                const auto free = space.local_free(t);
                for (int i = 0; i < nloc; ++i) {
                    const int gi = free[static_cast<std::size_t>(i)];
                    if (gi < 0) {
                        continue;
                    }
                    const BasisJet& p = jets[static_cast<std::size_t>(i)];
                    FaceBasisTrace tr;
                    tr.free = gi;
                    tr.jump = sign * p.normal_derivative(n);
                    tr.avg_lap = avg_weight * p.laplacian();
                    tr.avg_a = s.a * tr.avg_lap;
                    tr.avg_nn = avg_weight * p.second_normal_derivative(n);
                    traces.push_back(tr);
                }
            }
            const Real w = qp.weight;
            for (const auto& ti : traces) {
                for (const auto& tj : traces) {
                    const Real consistency = tj.avg_a * ti.jump + ti.avg_a * tj.jump +
                                             mu * (tj.avg_nn * ti.jump + ti.avg_nn * tj.jump);
                    const Real penalty = sigma / len * tj.jump * ti.jump;
                    acc.a_h.emplace_back(ti.free, tj.free, w * (consistency + penalty));
                    acc.norm_u.emplace_back(ti.free, tj.free, w * penalty);
                    acc.norm_extra.emplace_back(
                        ti.free, tj.free,
                        w * len / sigma * (tj.avg_lap * ti.avg_lap + tj.avg_nn * ti.avg_nn));
                }
            }
        }
    }
}

SparseReal block(int n, const SparseReal& b00, const SparseReal& b01, const SparseReal& b10,
                 const SparseReal& b11)
{
    Triplets entries;
    entries.reserve(static_cast<std::size_t>(b00.nonZeros() + b01.nonZeros() + b10.nonZeros() +
                                             b11.nonZeros()));
    auto append = [&](const SparseReal& m, int row0, int col0) {
        if (m.size() == 0) {
            return;
        }
        for (int k = 0; k < m.outerSize(); ++k) {
            for (SparseReal::InnerIterator it(m, k); it; ++it) {
                entries.emplace_back(static_cast<int>(it.row()) + row0, static_cast<int>(it.col()) + col0,
                                     it.value());
            }
        }
    };
    append(b00, 0, 0);
    append(b01, 0, n);
    append(b10, n, 0);
    append(b11, n, n);
    return build(2 * n, entries);
}

Real quadratic(const SparseReal& s, const ComplexVector& x)
{
    return std::max(0.0, sesquilinear(s, x, x).real());
}

}  // namespace

PencilMatrices assemble_pencil(const FeSpace& space, const ProblemCoefficients& coeffs,
                               const AssemblyOptions& options)
{
    const int degree = options.element_degree > 0 ? options.element_degree : 2 * space.degree() + 2;
    Accumulators acc;
    assemble_elements(space, coeffs, degree, acc);
    assemble_faces(space, coeffs, options.boundary_faces,
                   options.face_points > 0 ? options.face_points : space.face_points(), acc);

    PencilMatrices p;
    const int n = space.num_free_dofs();
    p.num_free = n;
    p.a_h = build(n, acc.a_h);
    p.stiffness = build(n, acc.stiffness);
    p.mass = build(n, acc.mass);
    p.mass_b = build(n, acc.mass_b);
    p.norm_u = build(n, acc.norm_u);
    p.norm_triple_extra = build(n, acc.norm_extra);

    const SparseReal empty(n, n);
    p.A = block(n, p.a_h, empty, empty, p.mass);
    p.B = block(n, p.stiffness, -p.mass_b, p.mass, empty);
    return p;
}

Complex sesquilinear(const SparseReal& s, const ComplexVector& x, const ComplexVector& y)
{
    return x.dot(s * y);
}

Real norm_h(const PencilMatrices& pencil, const ComplexVector& x)
{
    const int n = pencil.num_free;
    const ComplexVector u = x.head(n);
    const ComplexVector w = x.tail(n);
    return std::sqrt(quadratic(pencil.norm_u, u) + quadratic(pencil.mass, w));
}

Real norm_h_triple(const PencilMatrices& pencil, const ComplexVector& x)
{
    const int n = pencil.num_free;
    const ComplexVector u = x.head(n);
    const ComplexVector w = x.tail(n);
    return std::sqrt(quadratic(pencil.norm_u, u) + quadratic(pencil.norm_triple_extra, u) +
                     quadratic(pencil.mass, w));
}

namespace {

struct NormParts {
    Real h_sq = 0.0;
    Real extra_sq = 0.0;
};

NormParts norm_parts(const FeFunction& u, const FeFunction& omega, const ProblemCoefficients& coeffs)
{
    const FeSpace& space = u.space();
    const Mesh& mesh = space.mesh();
    const TriangleRule& rule = rule_for_degree(2 * space.degree() + 2);
    NormParts parts;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const ElementMap& map = space.element_map(t);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point x = map.to_physical(rule.points[q]);
            const Real w = rule.weights[q] * std::abs(map.det);
            const FieldJet ju = u.jet(t, x);
            const FieldJet jw = omega.jet(t, x);
            const Real h2 = std::norm(ju.value) + std::norm(ju.grad[0]) + std::norm(ju.grad[1]) +
                            std::norm(ju.hess[0]) + 2.0 * std::norm(ju.hess[1]) + std::norm(ju.hess[2]);
            parts.h_sq += w * (h2 + std::norm(jw.value));
        }
    }
    const Real sigma = coeffs.sigma();
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Real len = mesh.face(f).length;
        const FaceTrace dn = face_trace_jump(u, f, TraceQuantity::kNormalDerivative);
        const FaceTrace lap = face_trace_jump(u, f, TraceQuantity::kLaplacian);
        const FaceTrace dnn = face_trace_jump(u, f, TraceQuantity::kSecondNormalDerivative);
        for (std::size_t q = 0; q < dn.weights.size(); ++q) {
            parts.h_sq += dn.weights[q] * sigma / len * std::norm(dn.jump[q]);
            parts.extra_sq += dn.weights[q] * len / sigma *
                              (std::norm(lap.average[q]) + std::norm(dnn.average[q]));
        }
    }
    return parts;
}

}  // namespace

Real norm_h(const FeFunction& u, const FeFunction& omega, const ProblemCoefficients& coeffs)
{
    return std::sqrt(norm_parts(u, omega, coeffs).h_sq);
}

Real norm_h_triple(const FeFunction& u, const FeFunction& omega, const ProblemCoefficients& coeffs)
{
    const NormParts p = norm_parts(u, omega, coeffs);
    return std::sqrt(p.h_sq + p.extra_sq);
}

void dump_matrix(std::ostream& out, const SparseReal& matrix)
{
    out.precision(17);
    for (int k = 0; k < matrix.outerSize(); ++k) {
        for (SparseReal::InnerIterator it(matrix, k); it; ++it) {
            out << it.row() << ' ' << it.col() << ' ' << it.value() << " 0\n";
        }
    }
}

void dump_matrix(const std::string& path, const SparseReal& matrix)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    dump_matrix(out, matrix);
}

}  // namespace c0ipg
