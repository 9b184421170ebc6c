#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <c0ipg/adapt.hpp>
#include <c0ipg/assembly.hpp>
#include <c0ipg/history.hpp>

namespace fs = std::filesystem;
using namespace c0ipg;

namespace {

// Published reference values k_j for the two test domains.
std::optional<Complex> reference_k(Domain domain, const std::string& n, int index)
{
    if (domain == Domain::kSlit && n == "n16") {
        if (index == 1) return Complex(2.80677803, 0.0);
        if (index == 2) return Complex(2.98066000, 0.0);
    } else if (domain == Domain::kSlit && n == "affine") {
        if (index == 1) return Complex(4.14438323, 0.0);
        if (index == 7) return Complex(5.57000885, -1.31142340);
    } else if (domain == Domain::kLShape && n == "n16") {
        if (index == 1) return Complex(1.47609911, 0.0);
        if (index == 2) return Complex(1.56972499, 0.0);
    } else if (domain == Domain::kLShape && n == "affine") {
        if (index == 1) return Complex(2.30212024, 0.0);
        if (index == 5) return Complex(2.92423162, -0.56458999);
    }
    return std::nullopt;
}

Real default_h0(Domain domain)
{
    switch (domain) {
    case Domain::kSlit:
        return std::numbers::sqrt2 / 32.0;
    case Domain::kLShape:
        return std::numbers::sqrt2 / 16.0;
    case Domain::kUnitSquare:
        return std::numbers::sqrt2 / 8.0;
    }
    return 0.0;
}

std::string numbered(const std::string& stem, int iter, const std::string& ext)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%03d", iter);
    return stem + buf + ext;
}

int usage_error(const CLI::App& app, const std::string& message)
{
    std::cerr << "error: " << message << "\n\n" << app.help();
    return 2;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Adaptive C0 interior penalty solver for Helmholtz transmission eigenvalues"};

    std::string domain_name = "slit";
    std::string n_name = "n16";
    int degree = 2;
    std::optional<Real> theta;
    std::optional<Real> sigma;
    std::optional<Real> mu;
    std::optional<Real> h0;
    std::string target_k_text;
    std::string reference_k_text;
    int target_index = 1;
    int max_dof = 30000;
    int max_iters = 1000;
    int count = 3;
    Real tol = 1e-12;
    std::string out_dir = ".";
    std::string mode_name = "adaptive";
    std::string dual_form_name = "consistent";
    int dump_mesh_every = 1;
    bool dump_matrices = false;
    bool quiet = false;

    app.add_option("--domain", domain_name, "slit | lshape | unit-square")
        ->check(CLI::IsMember({"slit", "lshape", "unit-square"}))
        ->capture_default_str();
    app.add_option("--n", n_name, "Refraction index: n16 | affine")
        ->check(CLI::IsMember({"n16", "affine"}))
        ->capture_default_str();
    app.add_option("--degree", degree, "Polynomial degree m")->check(CLI::IsMember({2, 3}))->capture_default_str();
    app.add_option("--theta", theta, "Bulk marking parameter (default 0.25 for m=2, 0.5 for m=3)");
    app.add_option("--sigma", sigma, "Penalty parameter (default per refraction index)");
    app.add_option("--mu", mu, "Splitting parameter (default per refraction index)");
    app.add_option("--h0", h0, "Initial mesh size (default per domain)");
    app.add_option("--target-k", target_k_text,
                   "Target k, e.g. 2.92-0.56i (default: reference k of the target index when known)");
    app.add_option("--target-index", target_index, "Eigenvalue index j in the by-k ordering")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--reference-k", reference_k_text, "Reference k for the err_abs column");
    app.add_option("--max-dof", max_dof, "Stop after the first iteration with at least this many DOFs")
        ->capture_default_str();
    app.add_option("--max-iters", max_iters, "Maximum number of refinements")->capture_default_str();
    app.add_option("--count", count, "Eigenvalues computed per solve")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--tol", tol, "Eigensolver tolerance")->capture_default_str();
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--mode", mode_name, "adaptive | uniform")
        ->check(CLI::IsMember({"adaptive", "uniform"}))
        ->capture_default_str();
    app.add_option("--dual-form", dual_form_name, "Dual residual: consistent | literal")
        ->check(CLI::IsMember({"consistent", "literal"}))
        ->capture_default_str();
    app.add_option("--dump-mesh-every", dump_mesh_every,
                   "Write mesh and indicator snapshots every N iterations (0 disables)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_flag("--dump-matrices", dump_matrices, "Write the initial pencil matrices A.txt and B.txt");
    app.add_flag("-q,--quiet", quiet, "Suppress per-iteration progress");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return usage_error(app, e.what());
    }

    AdaptConfig config;
    std::optional<Complex> reference;
    Domain domain{};
    try {
        domain = parse_domain(domain_name);
        config.degree = degree;
        config.theta = theta.value_or(degree == 2 ? 0.25 : 0.5);
        config.target_index = target_index;
        config.max_dof = max_dof;
        config.max_iters = max_iters;
        config.count = count;
        config.tol = tol;
        config.mode = mode_name == "uniform" ? RefinementMode::kUniform : RefinementMode::kAdaptive;
        config.dual_form = dual_form_name == "literal" ? DualResidualForm::kLiteral : DualResidualForm::kConsistent;
        if (!target_k_text.empty()) {
            config.target_k = parse_complex(target_k_text);
        } else {
            config.target_k = reference_k(domain, n_name, target_index);
        }
        if (!reference_k_text.empty()) {
            reference = parse_complex(reference_k_text);
        }
        config.validate();
    } catch (const std::invalid_argument& e) {
        return usage_error(app, e.what());
    }

    const ProblemCoefficients base = builtin_coefficients(n_name);
    std::optional<ProblemCoefficients> coeffs;
    Mesh initial;
    try {
        coeffs = base.with_parameters(sigma.value_or(base.sigma()), mu.value_or(base.mu()));
        initial = make_uniform(domain, h0.value_or(default_h0(domain)));
        const FeSpace space(initial, config.degree);
        validate(*coeffs, initial, space);
        if (dump_matrices) {
            fs::create_directories(out_dir);
            const PencilMatrices pencil = assemble_pencil(space, *coeffs);
            dump_matrix((fs::path(out_dir) / "A.txt").string(), pencil.A);
            dump_matrix((fs::path(out_dir) / "B.txt").string(), pencil.B);
        }
    } catch (const std::invalid_argument& e) {
        return usage_error(app, e.what());
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create " << out_dir << ": " << ec.message() << '\n';
        return 2;
    }
    const fs::path out(out_dir);

    const AdaptTrace trace = run(initial, *coeffs, config, [&](const IterationState& state) {
        const IterationRecord& r = state.record;
        if (!quiet) {
            std::printf("iter %3d  dof %7d  k = %.10f %+.10fi  eta2 = %.3e", r.iter, r.dof, r.k.real(), r.k.imag(),
                        r.eta2_total);
            if (reference) {
                std::printf("  err = %.3e", std::abs(r.k - *reference));
            }
            std::printf("  (%.2fs)\n", r.seconds);
            std::fflush(stdout);
        }
        if (dump_mesh_every > 0 && r.iter % dump_mesh_every == 0) {
            write_mesh((out / numbered("mesh", r.iter, ".txt")).string(), state.mesh);
            write_indicators((out / numbered("indicators", r.iter, ".csv")).string(), state.combined);
        }
    });

    emit_history((out / "history.csv").string(), trace, reference);
    if (!trace.failure.empty()) {
        std::cerr << "solver failure: " << trace.failure << '\n';
        return 1;
    }
    return 0;
}
