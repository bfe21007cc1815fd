#pragma once

// Slow reference implementations for tests. Nothing here calls into the
// optimized paths except for reading the law parameters.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "dce/trajectory.hpp"

namespace dce::oracle {

inline double mirror(const MirrorLaw& law, double t)
{
    if (t < 0.0 || t > law.duration())
        return law.static_length();
    return law.static_length()
         + law.amplitude() * std::sin(2.0 * std::numbers::pi * t / law.period());
}

/// Root of t + L(t) = z by plain bisection down to 1e-14.
inline double bisect_reflection(const MirrorLaw& law, double z)
{
    double lo = z - law.static_length() - law.amplitude() - 1e-9;
    double hi = z - law.static_length() + law.amplitude() + 1e-9;
    for (int i = 0; i < 400 && hi - lo > 1e-14; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid + mirror(law, mid) - z < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double oracle_moore_R(const MirrorLaw& law, double z)
{
    const double L0 = law.static_length();
    double cur = z;
    double sum = 0.0;
    int n = 0;
    while (cur > L0) {
        double t = bisect_reflection(law, cur);
        sum += mirror(law, t);
        cur -= 2.0 * mirror(law, t);
        ++n;
    }
    return 2.0 * n + (z - 2.0 * sum) / L0;
}

struct OraclePair {
    std::complex<double> alpha;
    std::complex<double> beta;
};

/// Composite trapezoid rule with n_nodes points over [t/L0 - 1, t/L0 + 1].
inline OraclePair oracle_coefficients(const MirrorLaw& law, int r, int s, double t_eval, int n_nodes)
{
    if (n_nodes < 1000)
        throw std::invalid_argument("oracle_coefficients: need at least 1000 nodes");
    const double L0 = law.static_length();
    const double lo = t_eval / L0 - 1.0;
    const double h = 2.0 / (n_nodes - 1);
    std::complex<double> a{}, b{};
    for (int j = 0; j < n_nodes; ++j) {
        double x = lo + h * j;
        double wt = (j == 0 || j == n_nodes - 1) ? 0.5 * h : h;
        double phase_R = s * oracle_moore_R(law, L0 * x);
        a += wt * std::exp(std::complex<double>(0.0, -std::numbers::pi * (phase_R - r * x)));
        b += wt * std::exp(std::complex<double>(0.0, -std::numbers::pi * (phase_R + r * x)));
    }
    double pref = 0.5 * std::sqrt(static_cast<double>(r) / s);
    return {pref * a, -pref * b};
}

inline std::complex<double> oracle_beta(const MirrorLaw& law, int r, int s, double t_eval, int n_nodes)
{
    return oracle_coefficients(law, r, s, t_eval, n_nodes).beta;
}

struct OracleElliptic {
    double K;
    double E;
};

/// Maclaurin series in k^2:
///   K = pi/2 sum c_n^2 k^{2n},  E = pi/2 sum c_n^2 k^{2n} / (1 - 2n),
///   c_n = (2n-1)!! / (2n)!!.
/// Summed until the K term drops below 1e-18; restricted to k <= 0.9.
inline OracleElliptic oracle_elliptic(double kappa)
{
    if (!(kappa >= 0.0 && kappa <= 0.9))
        throw std::domain_error("oracle_elliptic: series used only for 0 <= kappa <= 0.9");
    const double k2 = kappa * kappa;
    double c = 1.0;
    double pw = 1.0;
    double K = 1.0;
    double E = 1.0;
    for (int n = 1; n < 5000; ++n) {
        c *= (2.0 * n - 1.0) / (2.0 * n);
        pw *= k2;
        double term = c * c * pw;
        K += term;
        E += term / (1.0 - 2.0 * n);
        if (term < 1e-18)
            break;
    }
    return {0.5 * std::numbers::pi * K, 0.5 * std::numbers::pi * E};
}

} // namespace dce::oracle
