#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dce {

/// Complete elliptic integrals K and E in the *modulus* convention:
/// K(k) = int_0^{pi/2} dphi / sqrt(1 - k^2 sin^2 phi). Note that many
/// libraries take the parameter m = k^2 instead. With the modulus form
/// K(0) = E(0) = pi/2, which is what makes the perturbative particle numbers
/// below vanish at T = 0.
struct EllipticPair {
    double K;
    double E;
};

namespace detail {

/// AGM from a_0 = 1, b_0 = k' = sqrt(1 - k^2), c_0 = k.
/// K = pi / (2 a_N),  E = K (1 - sum_n 2^{n-1} c_n^2).
inline EllipticPair agm_elliptic(double k, double kc)
{
    double a = 1.0;
    double b = kc;
    double sum = 0.5 * k * k;
    double pow2 = 0.5;
    for (int it = 0; it < 64; ++it) {
        double an = 0.5 * (a + b);
        double bn = std::sqrt(a * b);
        double cn = 0.5 * (a - b);
        pow2 *= 2.0;
        sum += pow2 * cn * cn;
        a = an;
        b = bn;
        if (std::abs(a - b) <= 1e-15 * a)
            break;
    }
    double K = std::numbers::pi / (2.0 * a);
    return {K, K * (1.0 - sum)};
}

inline void check_modulus(double kappa)
{
    if (!(kappa >= 0.0 && kappa < 1.0))
        throw std::domain_error("elliptic: modulus must lie in [0, 1), got " + std::to_string(kappa));
}

} // namespace detail

inline EllipticPair elliptic_KE(double kappa)
{
    detail::check_modulus(kappa);
    return detail::agm_elliptic(kappa, std::sqrt((1.0 - kappa) * (1.0 + kappa)));
}

inline double elliptic_K(double kappa) { return elliptic_KE(kappa).K; }
inline double elliptic_E(double kappa) { return elliptic_KE(kappa).E; }

/// Modulus used by the resonant-cavity approximations,
/// kappa = sqrt(1 - exp(-4 eps pi T / L0)). The complementary modulus
/// exp(-2 eps pi T / L0) is evaluated directly so that large T keeps precision.
struct ResonantModulus {
    double kappa;
    double complement;
};

inline ResonantModulus resonant_modulus(double epsilon, double T, double L0)
{
    if (!(epsilon > 0.0))
        throw std::domain_error("resonant_modulus: epsilon must be positive");
    if (!(T >= 0.0))
        throw std::domain_error("resonant_modulus: T must be non-negative");
    if (!(L0 > 0.0))
        throw std::domain_error("resonant_modulus: L0 must be positive");
    double x = 4.0 * epsilon * std::numbers::pi * T / L0;
    return {std::sqrt(-std::expm1(-x)), std::exp(-0.5 * x)};
}

/// Perturbative total number of created particles for the resonant law
/// a = eps L0, l0 = L0:  (1/pi^2) [ (1 - k^2/2) K^2 - E K ].
inline double n_app_total(double epsilon, double T, double L0)
{
    ResonantModulus m = resonant_modulus(epsilon, T, L0);
    if (m.kappa >= 1.0)
        throw std::domain_error("n_app_total: modulus rounds to 1 (T too large)");
    EllipticPair ke = detail::agm_elliptic(m.kappa, m.complement);
    double k2 = m.kappa * m.kappa;
    return ((1.0 - 0.5 * k2) * ke.K * ke.K - ke.E * ke.K) / (std::numbers::pi * std::numbers::pi);
}

/// Perturbative occupation of the fundamental mode: (2/pi^2) K E - 1/2.
inline double n_app_mode1(double epsilon, double T, double L0)
{
    ResonantModulus m = resonant_modulus(epsilon, T, L0);
    if (m.kappa >= 1.0)
        throw std::domain_error("n_app_mode1: modulus rounds to 1 (T too large)");
    EllipticPair ke = detail::agm_elliptic(m.kappa, m.complement);
    return 2.0 / (std::numbers::pi * std::numbers::pi) * ke.K * ke.E - 0.5;
}

} // namespace dce
