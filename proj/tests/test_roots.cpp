#include <cmath>

#include <gtest/gtest.h>

#include "dce/roots.hpp"

namespace {

TEST(FindRootBracketed, LinearAndNonlinear)
{
    auto lin = dce::find_root_bracketed([](double x) { return 2.0 * x - 1.0; }, 0.0, 3.0, 1e-14);
    EXPECT_TRUE(lin.converged);
    EXPECT_NEAR(lin.root, 0.5, 1e-14);

    auto cubic = dce::find_root_bracketed([](double x) { return x * x * x - 2.0; }, 0.0, 2.0, 1e-13);
    EXPECT_TRUE(cubic.converged);
    EXPECT_NEAR(cubic.root, std::cbrt(2.0), 1e-13);
}

TEST(FindRootBracketed, DecreasingFunctionAndEndpointRoots)
{
    auto dec = dce::find_root_bracketed([](double x) { return std::cos(x); }, 1.0, 2.0, 1e-14);
    EXPECT_NEAR(dec.root, M_PI / 2, 1e-14);
    auto end = dce::find_root_bracketed([](double x) { return x - 1.0; }, 1.0, 2.0, 1e-14);
    EXPECT_EQ(end.root, 1.0);
    EXPECT_EQ(end.iterations, 0);
}

TEST(FindRootBracketed, SecantDegenerateCaseStillConverges)
{
    // flat plateau followed by a steep rise defeats pure regula falsi
    auto f = [](double x) { return x < 0.9 ? -1e-12 : (x - 0.9) * 1e6 - 1e-12; };
    auto res = dce::find_root_bracketed(f, 0.0, 1.0, 1e-13);
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.root, 0.9, 1e-12);
    EXPECT_LT(res.iterations, 120);
}

TEST(FindRootBracketed, NoSignChangeIsAnInternalError)
{
    EXPECT_THROW(dce::find_root_bracketed([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12),
                 dce::internal_error);
}

TEST(FindRootBracketed, FewIterationsForNearLinearMirrorEquation)
{
    // t + 1 + 0.1 sin(2 pi t) = 1.2, bracket [0.1, 0.3]
    auto g = [](double t) { return t + 1.0 + 0.1 * std::sin(2.0 * M_PI * t) - 1.2; };
    auto res = dce::find_root_bracketed(g, 0.1, 0.3, 1e-12);
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.root, 0.12797847815008306, 1e-12);
    EXPECT_LE(res.iterations, 12);
}

} // namespace
