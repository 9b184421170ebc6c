#include "c0ipg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace c0ipg {

namespace {

LineRule make_gauss_legendre(int n)
{
    // Newton iteration on P_n over [-1, 1], then affine map to [0, 1].
    LineRule rule;
    rule.points.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Real x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        Real dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            Real p0 = 1.0;
            Real p1 = x;
            for (int k = 2; k <= n; ++k) {
                const Real pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const Real dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute derivative at the converged root for the weight.
        Real p0 = 1.0;
        Real p1 = x;
        for (int k = 2; k <= n; ++k) {
            const Real pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const Real w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto idx = static_cast<std::size_t>(n - 1 - i);
        rule.points[idx] = 0.5 * (x + 1.0);
        rule.weights[idx] = 0.5 * w;
    }
    return rule;
}

TriangleRule make_triangle_rule(int d)
{
    TriangleRule rule;
    rule.order = d;
    if (d == 1) {
        rule.points = {{1.0 / 3.0, 1.0 / 3.0}};
        rule.weights = {0.5};
        return rule;
    }
    if (d == 2) {
        rule.points = {{1.0 / 6.0, 1.0 / 6.0}, {2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0}};
        rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
        return rule;
    }
    // xi = s, eta = (1 - s) t with Jacobian (1 - s); the s-direction carries
    // one extra degree from the Jacobian.
    const LineRule& rs = gauss_legendre((d + 3) / 2);
    const LineRule& rt = gauss_legendre((d + 2) / 2);
    for (std::size_t i = 0; i < rs.points.size(); ++i) {
        const Real s = rs.points[i];
        for (std::size_t j = 0; j < rt.points.size(); ++j) {
            const Real t = rt.points[j];
            rule.points.push_back({s, (1.0 - s) * t});
            rule.weights.push_back(rs.weights[i] * rt.weights[j] * (1.0 - s));
        }
    }
    return rule;
}

}  // namespace

const LineRule& gauss_legendre(int n)
{
    if (n < 1 || n > 64) {
        throw std::invalid_argument("gauss_legendre: point count must be in [1, 64], got " +
                                    std::to_string(n));
    }
    static std::mutex mutex;
    static std::map<int, LineRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, make_gauss_legendre(n)).first;
    }
    return it->second;
}

const TriangleRule& rule_for_degree(int d)
{
    if (d < 1 || d > kMaxTriangleRuleDegree) {
        throw std::invalid_argument("rule_for_degree: degree must be in [1, 12], got " +
                                    std::to_string(d));
    }
    static const std::array<TriangleRule, kMaxTriangleRuleDegree + 1> rules = [] {
        std::array<TriangleRule, kMaxTriangleRuleDegree + 1> table;
        for (int k = 1; k <= kMaxTriangleRuleDegree; ++k) {
            table[static_cast<std::size_t>(k)] = make_triangle_rule(k);
        }
        return table;
    }();
    return rules[static_cast<std::size_t>(d)];
}

}  // namespace c0ipg
