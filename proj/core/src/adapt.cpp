#include "c0ipg/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <sstream>

#include "c0ipg/assembly.hpp"

namespace c0ipg {

MarkResult mark(std::span<const Real> values, Real theta)
{
    if (!(theta > 0.0 && theta < 1.0)) {
        throw std::invalid_argument("mark: theta must lie in (0, 1)");
    }
    Real total = 0.0;
    for (Real v : values) {
        if (!(v >= 0.0)) {
            throw std::invalid_argument("mark: indicators must be nonnegative");
        }
        total += v;
    }
    MarkResult result;
    if (total == 0.0) {
        result.converged = true;
        return result;
    }
    std::vector<int> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)];
    });
    const Real goal = theta * total;
    Real sum = 0.0;
    for (int id : order) {
        if (sum >= goal) {
            break;
        }
        sum += values[static_cast<std::size_t>(id)];
        result.marked.push_back(id);
    }
    std::sort(result.marked.begin(), result.marked.end());
    return result;
}

void AdaptConfig::validate() const
{
    std::ostringstream msg;
    if (!(theta > 0.0 && theta < 1.0)) {
        msg << "theta must lie in (0, 1), got " << theta;
    } else if (degree != 2 && degree != 3) {
        msg << "degree must be 2 or 3, got " << degree;
    } else if (target_index < 1) {
        msg << "target index must be at least 1, got " << target_index;
    } else if (max_iters < 0) {
        msg << "max iterations must be nonnegative, got " << max_iters;
    } else if (count < 1) {
        msg << "eigenvalue count must be at least 1, got " << count;
    } else if (!(tol > 0.0)) {
        msg << "solver tolerance must be positive, got " << tol;
    } else {
        return;
    }
    throw ConfigurationError(msg.str());
}

namespace {

EigenPair finish_pair(const PencilEigensolver& solver, const RawEigenPair& raw, const PencilMatrices& pencil,
                      const FeSpace& space)
{
    EigenPair pair = normalize_and_sort({raw}, pencil, space).front();
    attach_dual(pair, solver.solve_dual(raw.lambda), pencil);
    return pair;
}

const RawEigenPair& closest(const std::vector<RawEigenPair>& raw, Complex target)
{
    return *std::min_element(raw.begin(), raw.end(), [&](const RawEigenPair& a, const RawEigenPair& b) {
        return std::abs(a.lambda - target) < std::abs(b.lambda - target);
    });
}

}  // namespace

EigenPair solve_eigenpair(const FeSpace& space, const PencilMatrices& pencil, Complex shift,
                          const SolveOptions& options)
{
    const PencilEigensolver solver(pencil, shift, options);
    const auto raw = solver.solve();
    return finish_pair(solver, closest(raw, shift), pencil, space);
}

AdaptTrace run(const Mesh& initial, const ProblemCoefficients& coeffs, const AdaptConfig& config,
               const IterationObserver& observer)
{
    config.validate();
    AdaptTrace trace;
    Mesh mesh = initial;
    std::optional<Complex> target;
    if (config.target_k) {
        target = *config.target_k * *config.target_k;
    }

    for (int iter = 0;; ++iter) {
        const auto start = std::chrono::steady_clock::now();
        const FeSpace space(mesh, config.degree);
        validate(coeffs, mesh, space);
        const PencilMatrices pencil = assemble_pencil(space, coeffs);

        SolveOptions options;
        options.tol = config.tol;
        std::optional<EigenPair> pair;
        try {
            if (target) {
                options.count = std::min(config.count, pencil.size());
                const PencilEigensolver solver(pencil, *target, options);
                pair = finish_pair(solver, closest(solver.solve(), *target), pencil, space);
            } else {
                options.count = std::min(config.target_index + std::max(config.count, 4), pencil.size());
                const PencilEigensolver solver(pencil, 0.0, options);
                const auto raw = solver.solve();
                auto sorted = normalize_and_sort(raw, pencil, space);
                if (static_cast<int>(sorted.size()) < config.target_index) {
                    throw SolverError("fewer eigenvalues than the requested index");
                }
                const Complex lambda = sorted[static_cast<std::size_t>(config.target_index - 1)].lambda;
                pair = finish_pair(solver, closest(raw, lambda), pencil, space);
            }
        } catch (const SolverError& e) {
            trace.failure = e.what();
            return trace;
        }

        const IndicatorField primal = compute_indicators(space, coeffs, ResidualData::primal(*pair));
        const IndicatorField dual = compute_indicators(space, coeffs, ResidualData::dual(*pair, config.dual_form));
        std::vector<Real> combined(primal.element.size());
        for (std::size_t t = 0; t < combined.size(); ++t) {
            combined[t] = primal.element[t] + dual.element[t];
        }

        IterationRecord rec;
        rec.iter = iter;
        rec.dof = space.num_free_dofs();
        rec.triangles = mesh.num_triangles();
        rec.lambda = pair->lambda;
        rec.k = pair->k;
        rec.eta2_primal = primal.total;
        rec.eta2_dual = dual.total;
        rec.eta2_total = primal.total + dual.total;
        rec.residual = pair->residual;
        rec.dual_residual = pair->dual_residual;
        rec.b_pairing = pair->b_pairing;

        const bool last = iter >= config.max_iters || rec.dof >= config.max_dof;
        MarkResult marked;
        if (!last) {
            if (config.mode == RefinementMode::kUniform) {
                marked.marked.resize(static_cast<std::size_t>(mesh.num_triangles()));
                std::iota(marked.marked.begin(), marked.marked.end(), 0);
            } else {
                marked = mark(combined, config.theta);
            }
        }
        rec.marked = static_cast<int>(marked.marked.size());
        rec.seconds = std::chrono::duration<Real>(std::chrono::steady_clock::now() - start).count();
        trace.records.push_back(rec);
        if (observer) {
            observer(IterationState{trace.records.back(), mesh, space, *pair, combined});
        }
        if (last) {
            break;
        }
        if (marked.converged) {
            trace.converged_signal = true;
            break;
        }
        mesh = refine(mesh, marked.marked);
    }
    return trace;
}

AdaptTrace run(Domain domain, Real h0, const ProblemCoefficients& coeffs, const AdaptConfig& config,
               const IterationObserver& observer)
{
    return run(make_uniform(domain, h0), coeffs, config, observer);
}

}  // namespace c0ipg
