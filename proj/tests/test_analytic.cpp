#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dce/analytic.hpp"
#include "oracles/oracles.hpp"

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
// Maclaurin-series oracle at k = 0.5 (agrees with mpmath ellipk/ellipe(m = 0.25)).
constexpr double kK05 = 1.6857503548125963;
constexpr double kE05 = 1.4674622093394272;

TEST(Elliptic, ZeroModulus)
{
    EXPECT_DOUBLE_EQ(dce::elliptic_K(0.0), kHalfPi);
    EXPECT_DOUBLE_EQ(dce::elliptic_E(0.0), kHalfPi);
}

TEST(Elliptic, FrozenSeriesValues)
{
    EXPECT_NEAR(dce::elliptic_K(0.5), kK05, 1e-14);
    EXPECT_NEAR(dce::elliptic_E(0.5), kE05, 1e-14);
}

TEST(Elliptic, NearAndAtUnitModulus)
{
    double K = dce::elliptic_K(0.999999);
    EXPECT_TRUE(std::isfinite(K));
    // K ~ ln(4 / k') for k -> 1
    EXPECT_NEAR(K, std::log(4.0 / std::sqrt(1.0 - 0.999999 * 0.999999)), 1e-5);
    EXPECT_NEAR(dce::elliptic_E(0.999999), 1.0, 1e-5);
    EXPECT_THROW(dce::elliptic_K(1.0), std::domain_error);
    EXPECT_THROW(dce::elliptic_E(1.5), std::domain_error);
    EXPECT_THROW(dce::elliptic_K(-0.1), std::domain_error);
}

TEST(Elliptic, MonotoneInModulus)
{
    double K_prev = dce::elliptic_K(0.0);
    double E_prev = dce::elliptic_E(0.0);
    for (int i = 1; i < 1000; ++i) {
        double k = i / 1000.0;
        double K = dce::elliptic_K(k);
        double E = dce::elliptic_E(k);
        EXPECT_GT(K, K_prev);
        EXPECT_LT(E, E_prev);
        K_prev = K;
        E_prev = E;
    }
}

TEST(Elliptic, LegendreRelation)
{
    for (int i = 1; i < 200; ++i) {
        double k = i / 200.0;
        double kc = std::sqrt(1.0 - k * k);
        auto a = dce::elliptic_KE(k);
        auto b = dce::elliptic_KE(kc);
        EXPECT_NEAR(a.E * b.K + b.E * a.K - a.K * b.K, kHalfPi, 1e-10) << "k = " << k;
    }
}

TEST(Elliptic, AgreesWithSeriesOracle)
{
    for (int i = 0; i <= 90; ++i) {
        double k = i / 100.0;
        auto ref = dce::oracle::oracle_elliptic(k);
        EXPECT_NEAR(dce::elliptic_K(k), ref.K, 1e-10);
        EXPECT_NEAR(dce::elliptic_E(k), ref.E, 1e-10);
    }
}

TEST(ApproximateNumbers, VanishAtZeroDuration)
{
    EXPECT_NEAR(dce::n_app_total(0.01, 0.0, 1.0), 0.0, 1e-16);
    EXPECT_NEAR(dce::n_app_mode1(0.01, 0.0, 1.0), 0.0, 1e-15);
}

TEST(ApproximateNumbers, DualPathEvaluation)
{
    // series-based elliptic integrals as the second path
    auto series_total = [](double eps, double T, double L0) {
        double k = std::sqrt(1.0 - std::exp(-4.0 * eps * std::numbers::pi * T / L0));
        auto ke = dce::oracle::oracle_elliptic(k);
        return ((1.0 - 0.5 * k * k) * ke.K * ke.K - ke.E * ke.K) / (std::numbers::pi * std::numbers::pi);
    };
    auto series_mode1 = [](double eps, double T, double L0) {
        double k = std::sqrt(1.0 - std::exp(-4.0 * eps * std::numbers::pi * T / L0));
        auto ke = dce::oracle::oracle_elliptic(k);
        return 2.0 / (std::numbers::pi * std::numbers::pi) * ke.K * ke.E - 0.5;
    };
    EXPECT_NEAR(dce::n_app_total(0.01, 2.0, 1.0), series_total(0.01, 2.0, 1.0), 1e-12);
    EXPECT_NEAR(dce::n_app_mode1(0.01, 2.0, 1.0), series_mode1(0.01, 2.0, 1.0), 1e-12);
    for (double T : {0.5, 1.0, 4.0, 8.0})
        EXPECT_NEAR(dce::n_app_total(0.01, T, 1.0), series_total(0.01, T, 1.0), 1e-12);
    // mpmath, 30 digits
    EXPECT_NEAR(dce::n_app_total(0.01, 2.0, 1.0), 0.000986798294314404146, 1e-15);
    EXPECT_NEAR(dce::n_app_mode1(0.01, 2.0, 1.0), 0.000986068686179537687, 1e-15);
}

TEST(ApproximateNumbers, FundamentalModeAtTwoRoundTrips)
{
    EXPECT_NEAR(dce::n_app_mode1(0.01, 2.0, 1.0), 0.001, 0.0001);
}

TEST(ApproximateNumbers, MonotoneAndNonNegative)
{
    double prev_total = 0.0;
    double prev_mode1 = 0.0;
    for (int i = 1; i <= 400; ++i) {
        double T = 0.05 * i;
        double total = dce::n_app_total(0.1, T, 1.0);
        double mode1 = dce::n_app_mode1(0.1, T, 1.0);
        EXPECT_GE(total, 0.0);
        EXPECT_GE(mode1, 0.0);
        EXPECT_GT(total, prev_total);
        EXPECT_GT(mode1, prev_mode1);
        prev_total = total;
        prev_mode1 = mode1;
    }
}

TEST(ApproximateNumbers, DomainErrors)
{
    EXPECT_THROW(dce::n_app_total(0.0, 1.0, 1.0), std::domain_error);
    EXPECT_THROW(dce::n_app_mode1(0.01, -1.0, 1.0), std::domain_error);
}

} // namespace
