#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "dce/errors.hpp"

namespace dce {

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point rule by Newton iteration on P_n from the Tricomi initial guesses.
inline GaussLegendreRule gauss_legendre(int n)
{
    if (n < 1)
        throw usage_error("gauss_legendre: need at least one point");
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // returns (P_n(x), P_n'(x))
    auto legendre = [n](double x) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
    };
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            auto [p, dp] = legendre(x);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        double dp = legendre(x).second;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;
    return rule;
}

/// Composite rule: the nodes and weights of `rule` mapped onto each panel
/// [edges[k], edges[k+1]]. Output is ascending when edges are.
struct CompositeNodes {
    std::vector<double> x;
    std::vector<double> w;
};

inline CompositeNodes composite(const GaussLegendreRule& rule, const std::vector<double>& edges)
{
    CompositeNodes out;
    if (edges.size() < 2)
        return out;
    const std::size_t panels = edges.size() - 1;
    out.x.reserve(panels * rule.nodes.size());
    out.w.reserve(panels * rule.nodes.size());
    for (std::size_t k = 0; k < panels; ++k) {
        double mid = 0.5 * (edges[k] + edges[k + 1]);
        double half = 0.5 * (edges[k + 1] - edges[k]);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            out.x.push_back(mid + half * rule.nodes[i]);
            out.w.push_back(half * rule.weights[i]);
        }
    }
    return out;
}

} // namespace dce
