#include "c0ipg/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "c0ipg/quadrature.hpp"

namespace c0ipg {

namespace {

int element_rule_degree(const FeSpace& space, int requested)
{
    const int d = requested > 0 ? requested : 2 * space.degree() + 4;
    return std::min(d, kMaxTriangleRuleDegree);
}

FeFunction scaled(const FeFunction& fn, Complex s)
{
    return {fn.space(), s * fn.coefficients()};
}

Complex dot_grad(Point v, const FieldJet& j)
{
    return v.x * j.grad[0] + v.y * j.grad[1];
}

Complex dot_grad_laplacian(Point v, const FieldJet& j)
{
    const auto g = j.grad_laplacian();
    return v.x * g[0] + v.y * g[1];
}

// Per-side quantities entering the face indicators.
struct SideTraces {
    Complex dn;
    Complex dnn;
    Complex flux;  // c d(lap psi)/dn + (dc/dn) lap psi
    Complex a_lap;
};

SideTraces side_traces(const FieldJet& j, const CoefficientSample& s, Point n)
{
    const Complex lap = j.laplacian();
    return {j.normal_derivative(n), j.second_normal_derivative(n),
            s.c * j.normal_derivative_of_laplacian(n) + dot(s.grad_c, n) * lap, s.a * lap};
}

Real eta1_of(const FeFunction& fn, const ProblemCoefficients& coeffs, int face)
{
    const FaceTrace tr = face_trace_jump(fn, face, TraceQuantity::kNormalDerivative);
    Real acc = 0.0;
    for (std::size_t q = 0; q < tr.weights.size(); ++q) {
        acc += tr.weights[q] * std::norm(tr.jump[q]);
    }
    const Real len = fn.space().mesh().face(face).length;
    return coeffs.sigma() / std::sqrt(len) * std::sqrt(acc);
}

// Squared source-form extras of triangle kappa.
Real source_form_extras(const FeSpace& space, const ProblemCoefficients& coeffs, const ResidualData& data,
                        int kappa, int degree)
{
    const Mesh& mesh = space.mesh();
    const Real h = mesh.diameter(kappa);
    Real extra = 0.0;
    for (int f : mesh.triangle_faces(kappa)) {
        const Face& face = mesh.face(f);
        Real ratio_sq = 0.0;
        for (const auto& qp : face_quadrature_points(mesh, face, space.face_points() + 2)) {
            const Real n = coeffs.index().value(qp.point);
            ratio_sq += qp.weight * std::pow((n + 1.0) / (n - 1.0), 2);
        }
        const Real e_f = eta1_of(data.f, coeffs, f);
        const Real e_phi = eta1_of(data.phi, coeffs, f);
        extra += std::sqrt(ratio_sq) * std::pow(face.length, 4) * e_f * e_f;
        extra += std::pow(h, 4) * e_phi * e_phi;
    }
    const TriangleRule& rule = rule_for_degree(degree);
    const ElementMap& map = space.element_map(kappa);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point x = map.to_physical(rule.points[q]);
        const Complex diff = data.f.jet(kappa, x).value - data.phi.jet(kappa, x).value;
        extra += rule.weights[q] * std::abs(map.det) * std::norm(diff);
    }
    return extra;
}

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

}  // namespace

// ---------------------------------------------------------------------------
// ResidualData

ResidualData ResidualData::primal(const EigenPair& pair)
{
    return {pair.u, pair.omega, scaled(pair.u, pair.lambda), scaled(pair.omega, pair.lambda),
            ResidualMode::kPrimal, DualResidualForm::kConsistent};
}

ResidualData ResidualData::dual(const EigenPair& pair, DualResidualForm form)
{
    if (!pair.has_dual) {
        throw std::invalid_argument("ResidualData::dual: eigenpair has no dual vector attached");
    }
    return {pair.u_star, pair.omega_star, scaled(pair.u_star, pair.lambda_star),
            scaled(pair.omega_star, pair.lambda_star), ResidualMode::kDual, form};
}

Complex ResidualData::rhs(const CoefficientSample& s, const FieldJet& fj, const FieldJet& gj) const
{
    // lap(w f) = w lap f + 2 grad w . grad f + f lap w, with grad b = grad c, lap b = lap c.
    const Complex lap_f = fj.laplacian();
    const Complex cross = 2.0 * dot_grad(s.grad_c, fj) + fj.value * s.lap_c;
    if (mode == ResidualMode::kPrimal) {
        return -(s.c * lap_f + cross) - s.b * lap_f - s.b * gj.value;
    }
    const Complex g_term = dual_form == DualResidualForm::kConsistent ? gj.value : -s.b * gj.value;
    return -s.c * lap_f - (s.b * lap_f + cross) + g_term;
}

// ---------------------------------------------------------------------------
// Indicators

Real element_residual(const FeSpace& space, const ProblemCoefficients& coeffs, const ResidualData& data,
                      int kappa, int degree)
{
    const int d = element_rule_degree(space, degree);
    const TriangleRule& rule = rule_for_degree(d);
    const auto& ref = space.reference_jets(d);
    const ElementMap& map = space.element_map(kappa);
    const int nloc = space.local_size();

    std::array<Complex, kMaxLocalDofs> c_psi{};
    std::array<Complex, kMaxLocalDofs> c_f{};
    std::array<Complex, kMaxLocalDofs> c_g{};
    data.psi.local_coefficients(kappa, c_psi);
    data.f.local_coefficients(kappa, c_f);
    data.g.local_coefficients(kappa, c_g);

    LocalJets jets;
    Real acc = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        map.transform(ref[q], jets, nloc);
        const FieldJet psi = combine(jets, c_psi, nloc);
        const FieldJet f = combine(jets, c_f, nloc);
        const FieldJet g = combine(jets, c_g, nloc);
        const CoefficientSample s = coeffs.at(map.to_physical(rule.points[q]));
        // lap(c lap psi) = c lap^2 psi + 2 grad c . grad lap psi + lap c lap psi; lap^2 psi = 0 for m <= 3.
        const Complex operator_term = 2.0 * dot_grad_laplacian(s.grad_c, psi) + s.lap_c * psi.laplacian();
        const Complex r = data.rhs(s, f, g) - operator_term;
        acc += rule.weights[q] * std::abs(map.det) * std::norm(r);
    }
    const Real h = space.mesh().diameter(kappa);
    return h * h * std::sqrt(acc);
}

FaceIndicatorValues face_indicators(const FeSpace& space, const ProblemCoefficients& coeffs,
                                    const ResidualData& data, int face_id)
{
    const Mesh& mesh = space.mesh();
    const Face& face = mesh.face(face_id);
    const Point n = face.normal;
    Real s1 = 0.0;
    Real s2 = 0.0;
    Real s3 = 0.0;
    Real s4 = 0.0;
    for (const auto& qp : face_quadrature_points(mesh, face, space.face_points())) {
        const CoefficientSample s = coeffs.at(qp.point);
        const SideTraces minus = side_traces(data.psi.jet(face.minus, qp.point), s, n);
        if (face.is_interior()) {
            const SideTraces plus = side_traces(data.psi.jet(face.plus, qp.point), s, n);
            s1 += qp.weight * std::norm(plus.dn - minus.dn);
            s2 += qp.weight * std::norm(plus.dnn - minus.dnn);
            s3 += qp.weight * std::norm(plus.flux - minus.flux);
            s4 += qp.weight * std::norm(plus.a_lap - minus.a_lap);
        } else {
            s1 += qp.weight * std::norm(minus.dn);
        }
    }
    const Real len = face.length;
    FaceIndicatorValues v;
    v.eta1 = coeffs.sigma() / std::sqrt(len) * std::sqrt(s1);
    if (face.is_interior()) {
        v.eta2 = coeffs.mu() * std::sqrt(len) * std::sqrt(s2);
        v.eta3 = std::pow(len, 1.5) * std::sqrt(s3);
        v.eta4 = std::sqrt(len) * std::sqrt(s4);
    }
    return v;
}

Real element_indicator(const FeSpace& space, const ProblemCoefficients& coeffs, const ResidualData& data,
                       int kappa, const IndicatorOptions& options)
{
    const Real ek = element_residual(space, coeffs, data, kappa, options.element_degree);
    Real total = ek * ek;
    for (int f : space.mesh().triangle_faces(kappa)) {
        const FaceIndicatorValues v = face_indicators(space, coeffs, data, f);
        total += space.mesh().face(f).is_interior() ? 0.5 * v.sum_sq() : v.eta1 * v.eta1;
    }
    if (options.full_source_form) {
        total += source_form_extras(space, coeffs, data, kappa, element_rule_degree(space, options.element_degree));
    }
    return total;
}

IndicatorField compute_indicators(const FeSpace& space, const ProblemCoefficients& coeffs,
                                  const ResidualData& data, const IndicatorOptions& options)
{
    const Mesh& mesh = space.mesh();
    IndicatorField field;
    field.faces.resize(static_cast<std::size_t>(mesh.num_faces()));
    for (int f = 0; f < mesh.num_faces(); ++f) {
        field.faces[static_cast<std::size_t>(f)] = face_indicators(space, coeffs, data, f);
    }
    field.element.resize(static_cast<std::size_t>(mesh.num_triangles()));
    field.element_residual.resize(static_cast<std::size_t>(mesh.num_triangles()));
    const int degree = element_rule_degree(space, options.element_degree);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Real ek = element_residual(space, coeffs, data, t, degree);
        Real total = ek * ek;
        for (int f : mesh.triangle_faces(t)) {
            const FaceIndicatorValues& v = field.faces[static_cast<std::size_t>(f)];
            total += mesh.face(f).is_interior() ? 0.5 * v.sum_sq() : v.eta1 * v.eta1;
        }
        if (options.full_source_form) {
            total += source_form_extras(space, coeffs, data, t, degree);
        }
        field.element_residual[static_cast<std::size_t>(t)] = ek;
        field.element[static_cast<std::size_t>(t)] = total;
        field.total += total;
    }
    return field;
}

// ---------------------------------------------------------------------------
// Oscillations

LocalProjection::LocalProjection(const FeSpace& space, int triangle, int j) : j_(j)
{
    if (j < 0) {
        throw std::invalid_argument("LocalProjection: degree must be nonnegative");
    }
    const Mesh& mesh = space.mesh();
    const auto p = mesh.corners(triangle);
    center_ = (1.0 / 3.0) * (p[0] + p[1] + p[2]);
    scale_ = mesh.diameter(triangle);
    for (int d = 0; d <= j; ++d) {
        for (int b = 0; b <= d; ++b) {
            exponents_.push_back({d - b, b});
        }
    }
    const int degree = std::min(kMaxTriangleRuleDegree, 2 * std::max(j, space.degree()) + 4);
    const TriangleRule& rule = rule_for_degree(degree);
    const ElementMap& map = space.element_map(triangle);
    const auto nq = static_cast<Eigen::Index>(rule.size());
    const auto nk = static_cast<Eigen::Index>(exponents_.size());
    basis_.resize(nq, nk);
    for (Eigen::Index q = 0; q < nq; ++q) {
        const Point x = map.to_physical(rule.points[static_cast<std::size_t>(q)]);
        points_.push_back(x);
        weights_.push_back(rule.weights[static_cast<std::size_t>(q)] * std::abs(map.det));
        const Real sx = (x.x - center_.x) / scale_;
        const Real sy = (x.y - center_.y) / scale_;
        for (Eigen::Index k = 0; k < nk; ++k) {
            const auto& e = exponents_[static_cast<std::size_t>(k)];
            basis_(q, k) = ipow(sx, e[0]) * ipow(sy, e[1]);
        }
    }
    const Eigen::Map<const RealVector> w(weights_.data(), nq);
    const RealMatrix gram = basis_.transpose() * w.asDiagonal() * basis_;
    gram_.compute(gram);
}

std::vector<Complex> LocalProjection::project(const std::vector<Complex>& values) const
{
    const auto nq = static_cast<Eigen::Index>(points_.size());
    ComplexVector rhs = ComplexVector::Zero(basis_.cols());
    for (Eigen::Index q = 0; q < nq; ++q) {
        rhs += (weights_[static_cast<std::size_t>(q)] * values[static_cast<std::size_t>(q)]) *
               basis_.row(q).transpose().cast<Complex>();
    }
    RealVector re = gram_.solve(rhs.real());
    RealVector im = gram_.solve(rhs.imag());
    std::vector<Complex> out(static_cast<std::size_t>(basis_.cols()));
    for (Eigen::Index k = 0; k < basis_.cols(); ++k) {
        out[static_cast<std::size_t>(k)] = Complex(re[k], im[k]);
    }
    return out;
}

FieldJet LocalProjection::evaluate(const std::vector<Complex>& coeffs, Point x) const
{
    const Real sx = (x.x - center_.x) / scale_;
    const Real sy = (x.y - center_.y) / scale_;
    constexpr std::array<std::array<int, 2>, 6> orders = {{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};
    std::array<Complex, 6> acc{};
    for (std::size_t k = 0; k < exponents_.size(); ++k) {
        const int p = exponents_[k][0];
        const int q = exponents_[k][1];
        for (std::size_t d = 0; d < orders.size(); ++d) {
            const int a = orders[d][0];
            const int b = orders[d][1];
            if (a > p || b > q) {
                continue;
            }
            const Real v = falling(p, a) * falling(q, b) * ipow(sx, p - a) * ipow(sy, q - b) /
                           ipow(scale_, a + b);
            acc[d] += coeffs[k] * v;
        }
    }
    FieldJet j;
    j.value = acc[0];
    j.grad = {acc[1], acc[2]};
    j.hess = {acc[3], acc[4], acc[5]};
    return j;
}

Oscillations oscillations(const FeSpace& space, const ProblemCoefficients& coeffs, const ResidualData& data,
                          int j)
{
    const Mesh& mesh = space.mesh();
    const int nt = mesh.num_triangles();
    std::vector<LocalProjection> proj;
    std::vector<std::vector<Complex>> c_proj;
    proj.reserve(static_cast<std::size_t>(nt));
    c_proj.reserve(static_cast<std::size_t>(nt));

    Oscillations osc;
    Real osc_f = 0.0;
    for (int t = 0; t < nt; ++t) {
        proj.emplace_back(space, t, j);
        const LocalProjection& P = proj.back();
        const auto& pts = P.points();
        const std::size_t nq = pts.size();
        std::vector<Complex> c_vals(nq);
        std::vector<Complex> first(nq);   // c f (primal) or b f (dual), enters through its Laplacian
        std::vector<Complex> second(nq);  // b lap f (primal) or c lap f (dual)
        std::vector<Complex> third(nq);   // b g, or g
        std::vector<Complex> exact(nq);
        for (std::size_t q = 0; q < nq; ++q) {
            const CoefficientSample s = coeffs.at(pts[q]);
            const FieldJet f = data.f.jet(t, pts[q]);
            const FieldJet g = data.g.jet(t, pts[q]);
            c_vals[q] = s.c;
            if (data.mode == ResidualMode::kPrimal) {
                first[q] = s.c * f.value;
                second[q] = s.b * f.laplacian();
                third[q] = -s.b * g.value;
            } else {
                first[q] = s.b * f.value;
                second[q] = s.c * f.laplacian();
                third[q] = data.dual_form == DualResidualForm::kConsistent ? g.value : -s.b * g.value;
            }
            exact[q] = data.rhs(s, f, g);
        }
        c_proj.push_back(P.project(c_vals));
        const auto p_first = P.project(first);
        const auto p_second = P.project(second);
        const auto p_third = P.project(third);
        Real acc = 0.0;
        for (std::size_t q = 0; q < nq; ++q) {
            const Complex hat = -P.evaluate(p_first, pts[q]).laplacian() - P.evaluate(p_second, pts[q]).value +
                                P.evaluate(p_third, pts[q]).value;
            acc += P.weights()[q] * std::norm(exact[q] - hat);
        }
        const Real h = mesh.diameter(t);
        osc_f += std::pow(h, 4) * acc;
    }
    osc.f = std::sqrt(osc_f);

    const Real mu = coeffs.mu();
    Real osc3 = 0.0;
    Real osc4 = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        if (!face.is_interior()) {
            continue;
        }
        const Point n = face.normal;
        Real s3 = 0.0;
        Real s3_hat = 0.0;
        Real s4 = 0.0;
        Real s4_hat = 0.0;
        for (const auto& qp : face_quadrature_points(mesh, face, space.face_points())) {
            const CoefficientSample s = coeffs.at(qp.point);
            Complex jump3 = 0.0;
            Complex jump3_hat = 0.0;
            Complex jump4 = 0.0;
            Complex jump4_hat = 0.0;
            for (int side = 0; side < 2; ++side) {
                const int t = side == 0 ? face.minus : face.plus;
                const Real sign = side == 0 ? -1.0 : 1.0;
                const FieldJet psi = data.psi.jet(t, qp.point);
                const Complex lap = psi.laplacian();
                const Complex dlap = psi.normal_derivative_of_laplacian(n);
                const FieldJet pc = proj[static_cast<std::size_t>(t)].evaluate(c_proj[static_cast<std::size_t>(t)],
                                                                                qp.point);
                jump3 += sign * (s.c * dlap + dot(s.grad_c, n) * lap);
                jump3_hat += sign * (pc.value * dlap + pc.normal_derivative(n) * lap);
                jump4 += sign * (s.a * lap);
                jump4_hat += sign * ((pc.value - mu) * lap);
            }
            s3 += qp.weight * std::norm(jump3);
            s3_hat += qp.weight * std::norm(jump3_hat);
            s4 += qp.weight * std::norm(jump4);
            s4_hat += qp.weight * std::norm(jump4_hat);
        }
        const Real len = face.length;
        const Real d3 = std::pow(len, 1.5) * (std::sqrt(s3) - std::sqrt(s3_hat));
        const Real d4 = std::sqrt(len) * (std::sqrt(s4) - std::sqrt(s4_hat));
        // Each interior face belongs to two elements.
        osc3 += 2.0 * d3 * d3;
        osc4 += 2.0 * d4 * d4;
    }
    osc.eta3 = std::sqrt(osc3);
    osc.eta4 = std::sqrt(osc4);
    return osc;
}

}  // namespace c0ipg
