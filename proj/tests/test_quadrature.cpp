#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "dce/quadrature.hpp"

namespace {

TEST(GaussLegendre, KnownLowOrderRules)
{
    auto r1 = dce::gauss_legendre(1);
    EXPECT_EQ(r1.nodes[0], 0.0);
    EXPECT_DOUBLE_EQ(r1.weights[0], 2.0);

    auto r2 = dce::gauss_legendre(2);
    EXPECT_NEAR(r2.nodes[0], -1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(r2.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(r2.weights[0], 1.0, 1e-15);

    auto r3 = dce::gauss_legendre(3);
    EXPECT_NEAR(r3.nodes[2], std::sqrt(0.6), 1e-15);
    EXPECT_NEAR(r3.weights[1], 8.0 / 9.0, 1e-15);

    EXPECT_THROW(dce::gauss_legendre(0), dce::usage_error);
}

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2nMinus1)
{
    for (int n : {4, 8, 13, 32, 64}) {
        auto rule = dce::gauss_legendre(n);
        EXPECT_NEAR(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0), 2.0, 1e-13);
        for (std::size_t i = 1; i < rule.nodes.size(); ++i)
            EXPECT_LT(rule.nodes[i - 1], rule.nodes[i]);
        for (int deg = 0; deg < 2 * n; ++deg) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i)
                sum += rule.weights[i] * std::pow(rule.nodes[i], deg);
            double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
            EXPECT_NEAR(sum, exact, 1e-13) << "n = " << n << ", degree " << deg;
        }
    }
}

TEST(Composite, OscillatoryIntegral)
{
    // int_0^2 exp(-i pi 7 x) cos(pi x) dx = 0 for integer frequencies
    auto rule = dce::gauss_legendre(8);
    std::vector<double> edges;
    for (int k = 0; k <= 20; ++k)
        edges.push_back(0.1 * k);
    auto nodes = dce::composite(rule, edges);
    ASSERT_EQ(nodes.x.size(), 160u);
    double re = 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j < nodes.x.size(); ++j) {
        re += nodes.w[j] * std::cos(7 * M_PI * nodes.x[j]) * std::cos(M_PI * nodes.x[j]);
        s += nodes.w[j] * std::sin(M_PI * nodes.x[j] / 2.0);
    }
    EXPECT_NEAR(re, 0.0, 1e-14);
    EXPECT_NEAR(s, 4.0 / M_PI, 1e-14);
}

} // namespace
