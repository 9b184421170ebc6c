#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <c0ipg/adapt.hpp>

#include "test_support.hpp"

using namespace c0ipg;
using c0ipg::testing::brute_force_minimum;

namespace {

AdaptConfig small_config()
{
    AdaptConfig config;
    config.degree = 2;
    config.theta = 0.3;
    config.target_k = Complex(1.88, 0.0);
    config.max_dof = 700;
    return config;
}

}  // namespace

TEST(Mark, FourThreeTwoOne)
{
    // Half of the total is 5 > 4, so one element is not enough.
    const std::vector<Real> v{4, 3, 2, 1};
    const MarkResult r = mark(v, 0.5);
    EXPECT_EQ(r.marked, (std::vector<int>{0, 1}));
    EXPECT_EQ(brute_force_minimum(v, 0.5), 2);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(mark(v, 0.4).marked, (std::vector<int>{0}));
}

TEST(Mark, ThreeQuartersNeedsThreeElements)
{
    const std::vector<Real> v{4, 3, 2, 1};
    EXPECT_EQ(mark(v, 0.75).marked, (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(brute_force_minimum(v, 0.75), 3);
}

TEST(Mark, ThetaNearOneMarksEverything)
{
    const std::vector<Real> v{0.5, 3, 1.5, 2, 0.25};
    EXPECT_EQ(mark(v, 1.0 - 1e-12).marked, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(Mark, TiesGoToLowerIds)
{
    const std::vector<Real> v{1, 2, 1, 2, 1};
    EXPECT_EQ(mark(v, 0.5).marked, (std::vector<int>{1, 3}));
    EXPECT_EQ(mark(v, 0.6).marked, (std::vector<int>{0, 1, 3}));
}

TEST(Mark, ResultIsSortedById)
{
    const std::vector<Real> v{1, 5, 2, 7, 3};
    EXPECT_EQ(mark(v, 0.6).marked, (std::vector<int>{1, 3}));
    EXPECT_EQ(mark(v, 0.7).marked, (std::vector<int>{1, 3, 4}));
}

TEST(Mark, AllZeroSignalsConvergence)
{
    const std::vector<Real> v{0, 0, 0};
    const MarkResult r = mark(v, 0.5);
    EXPECT_TRUE(r.marked.empty());
    EXPECT_TRUE(r.converged);
}

TEST(Mark, RejectsInvalidInput)
{
    const std::vector<Real> v{1, 2};
    EXPECT_THROW(mark(v, 0.0), std::invalid_argument);
    EXPECT_THROW(mark(v, 1.0), std::invalid_argument);
    EXPECT_THROW(mark(v, std::numeric_limits<Real>::quiet_NaN()), std::invalid_argument);
    const std::vector<Real> negative{1, -2};
    EXPECT_THROW(mark(negative, 0.5), std::invalid_argument);
    const std::vector<Real> nan{1, std::numeric_limits<Real>::quiet_NaN()};
    EXPECT_THROW(mark(nan, 0.5), std::invalid_argument);
}

TEST(Mark, MinimalAgainstBruteForceOnRandomVectors)
{
    std::mt19937 gen(2024);
    std::uniform_int_distribution<int> size(1, 15);
    std::uniform_real_distribution<Real> theta(0.01, 0.99);
    std::exponential_distribution<Real> value(1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Real> v(static_cast<std::size_t>(size(gen)));
        for (Real& x : v) {
            x = value(gen);
        }
        if (trial % 4 == 0) {
            v[0] = v.back();  // force a tie
        }
        const Real th = theta(gen);
        const MarkResult r = mark(v, th);
        EXPECT_EQ(static_cast<int>(r.marked.size()), brute_force_minimum(v, th)) << "trial " << trial;
        Real sum = 0.0;
        Real total = 0.0;
        for (int id : r.marked) {
            sum += v[static_cast<std::size_t>(id)];
        }
        for (Real x : v) {
            total += x;
        }
        EXPECT_GE(sum, th * total);
        EXPECT_TRUE(std::is_sorted(r.marked.begin(), r.marked.end()));
        EXPECT_EQ(mark(v, th).marked, r.marked);
    }
}

TEST(AdaptConfigTest, Validation)
{
    AdaptConfig ok;
    EXPECT_NO_THROW(ok.validate());
    auto expect_bad = [](auto edit) {
        AdaptConfig c;
        edit(c);
        EXPECT_THROW(c.validate(), ConfigurationError);
    };
    expect_bad([](AdaptConfig& c) { c.theta = 0.0; });
    expect_bad([](AdaptConfig& c) { c.theta = 1.0; });
    expect_bad([](AdaptConfig& c) { c.degree = 4; });
    expect_bad([](AdaptConfig& c) { c.target_index = 0; });
    expect_bad([](AdaptConfig& c) { c.max_iters = -1; });
    expect_bad([](AdaptConfig& c) { c.count = 0; });
    expect_bad([](AdaptConfig& c) { c.tol = 0.0; });
}

TEST(Run, ZeroIterationsSolvesOnce)
{
    AdaptConfig config = small_config();
    config.max_iters = 0;
    const Mesh mesh = c0ipg::testing::unit_square(4);
    const AdaptTrace trace = run(mesh, builtin_coefficients("n16"), config);
    ASSERT_TRUE(trace.failure.empty()) << trace.failure;
    ASSERT_EQ(trace.records.size(), 1u);
    EXPECT_EQ(trace.records[0].iter, 0);
    EXPECT_EQ(trace.records[0].marked, 0);
    EXPECT_EQ(trace.records[0].triangles, mesh.num_triangles());
}

TEST(Run, AdaptiveLoopInvariants)
{
    const AdaptConfig config = small_config();
    const Mesh initial = c0ipg::testing::unit_square(4);
    std::vector<Mesh> meshes;
    std::vector<std::vector<int>> marks;
    int calls = 0;
    const AdaptTrace trace = run(initial, builtin_coefficients("n16"), config, [&](const IterationState& s) {
        ++calls;
        EXPECT_EQ(static_cast<int>(s.combined.size()), s.mesh.num_triangles());
        EXPECT_EQ(s.record.dof, s.space.num_free_dofs());
        EXPECT_NEAR(std::abs(s.pair.lambda - s.record.lambda), 0.0, 0.0);
        Real sum = 0.0;
        for (Real v : s.combined) {
            EXPECT_GE(v, 0.0);
            sum += v;
        }
        EXPECT_NEAR(sum, s.record.eta2_total, 1e-12 * sum);
        meshes.push_back(s.mesh);
        marks.push_back(mark(s.combined, config.theta).marked);
    });
    ASSERT_TRUE(trace.failure.empty()) << trace.failure;
    ASSERT_GE(trace.records.size(), 3u);
    EXPECT_EQ(calls, static_cast<int>(trace.records.size()));
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const IterationRecord& r = trace.records[i];
        EXPECT_EQ(r.iter, static_cast<int>(i));
        EXPECT_NEAR(r.eta2_total, r.eta2_primal + r.eta2_dual, 1e-12 * r.eta2_total);
        EXPECT_LE(r.residual / std::abs(r.lambda), 1e-8);
        EXPECT_GT(std::abs(r.b_pairing), 1e-6);
        EXPECT_NEAR(std::abs(r.k * r.k - r.lambda), 0.0, 1e-12 * std::abs(r.lambda));
        if (i + 1 < trace.records.size()) {
            EXPECT_LT(r.dof, trace.records[i + 1].dof);
            EXPECT_LT(r.dof, config.max_dof);
            EXPECT_EQ(r.marked, static_cast<int>(marks[i].size()));
            // Every marked triangle is gone from the next mesh.
            const Mesh& before = meshes[i];
            const Mesh& after = meshes[i + 1];
            for (int t : marks[i]) {
                int children = 0;
                for (const Triangle& s : after.triangles()) {
                    if (s.parent == t) {
                        EXPECT_GT(s.generation, before.triangle(t).generation);
                        ++children;
                    }
                }
                EXPECT_GE(children, 2);
            }
        }
    }
    EXPECT_GE(trace.records.back().dof, config.max_dof);
    EXPECT_EQ(trace.records.back().marked, 0);
    // The tracked eigenvalue approaches the lowest one of the unit square from above.
    EXPECT_GT(trace.records.back().k.real(), 1.8796);
    EXPECT_LT(trace.records.back().k.real(), trace.records.front().k.real());
}

TEST(Run, Deterministic)
{
    AdaptConfig config = small_config();
    config.max_dof = 400;
    const Mesh initial = c0ipg::testing::unit_square(4);
    std::vector<std::vector<Real>> first;
    std::vector<std::vector<Real>> second;
    run(initial, builtin_coefficients("affine").with_parameters(20.0, 1.0 / 9.0), config,
        [&](const IterationState& s) { first.push_back(s.combined); });
    run(initial, builtin_coefficients("affine").with_parameters(20.0, 1.0 / 9.0), config,
        [&](const IterationState& s) { second.push_back(s.combined); });
    ASSERT_EQ(first.size(), second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        EXPECT_EQ(mark(first[i], config.theta).marked, mark(second[i], config.theta).marked);
    }
}

TEST(Run, UniformModeRefinesEverything)
{
    AdaptConfig config = small_config();
    config.mode = RefinementMode::kUniform;
    config.max_iters = 2;
    config.max_dof = 1000000;
    const AdaptTrace trace = run(c0ipg::testing::unit_square(2), builtin_coefficients("n16"), config);
    ASSERT_EQ(trace.records.size(), 3u);
    for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
        EXPECT_EQ(trace.records[i].marked, trace.records[i].triangles);
        EXPECT_GE(trace.records[i + 1].triangles, 2 * trace.records[i].triangles);
    }
}

TEST(Run, IndexSelectionPicksLowestEigenvalue)
{
    AdaptConfig config = small_config();
    config.target_k.reset();
    config.target_index = 1;
    config.max_iters = 0;
    const AdaptTrace by_index = run(c0ipg::testing::unit_square(4), builtin_coefficients("n16"), config);
    config.target_k = Complex(1.5, 0.0);
    const AdaptTrace by_target = run(c0ipg::testing::unit_square(4), builtin_coefficients("n16"), config);
    ASSERT_EQ(by_index.records.size(), 1u);
    ASSERT_EQ(by_target.records.size(), 1u);
    EXPECT_NEAR(std::abs(by_index.records[0].lambda - by_target.records[0].lambda), 0.0,
                1e-8 * std::abs(by_index.records[0].lambda));
}

TEST(Run, InvalidConfigThrows)
{
    AdaptConfig config = small_config();
    config.theta = 1.5;
    EXPECT_THROW(run(c0ipg::testing::unit_square(2), builtin_coefficients("n16"), config), ConfigurationError);
}
