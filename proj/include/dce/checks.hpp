#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dce/analytic.hpp"
#include "dce/bogoliubov.hpp"
#include "dce/moore.hpp"
#include "dce/scenarios.hpp"

/// Invariant suite run by `dce check`.
namespace dce {

struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct CheckOptions {
    /// Laws exercised by the Moore, triviality, shift and density checks.
    std::vector<MirrorLaw> laws{MirrorLaw(1.0, 0.01, 1.0, 2.0), MirrorLaw(1.0, 0.1, 1.0, 2.0)};
    std::size_t moore_samples = 10000;
    int n_max = 40;
    /// Scenario configs whose runs must all converge with small defects.
    std::vector<std::filesystem::path> presets;
    unsigned threads = 1;
};

namespace detail {

inline std::string sci(double v)
{
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

inline CheckOutcome outcome(std::string name, double worst, double limit)
{
    return {std::move(name), worst < limit, "worst " + sci(worst) + ", limit " + sci(limit)};
}

} // namespace detail

/// max |R(t + L(t)) - R(t - L(t)) - 2| over an even grid of t in [0, T + 2 L0].
inline double moore_residual(const MirrorLaw& law, std::size_t samples)
{
    const double hi = law.duration() + 2.0 * law.static_length();
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double t = hi * (static_cast<double>(i) + 0.5) / static_cast<double>(samples);
        double L = law.position(t);
        worst = std::max(worst, std::abs(moore_R(law, t + L) - moore_R(law, t - L) - 2.0));
    }
    return worst;
}

inline CheckOutcome check_moore_residual(const CheckOptions& o)
{
    double worst = 0.0;
    for (const auto& law : o.laws)
        worst = std::max(worst, moore_residual(law, o.moore_samples));
    return detail::outcome("Moore functional equation residual", worst, 1e-9);
}

inline CheckOutcome check_static_cavity(const CheckOptions& o)
{
    const MirrorLaw still(1.0, 0.0, 1.0, 2.0);
    TruncationOptions t;
    t.n_max = o.n_max;
    t.threads = o.threads;
    std::vector<BogoliubovRow> rows;
    auto res = spectrum(still, t, {}, &rows);
    double worst = 0.0;
    for (const auto& row : rows)
        for (const auto& b : row.betas)
            worst = std::max(worst, std::abs(b));
    for (double n : res.occupations)
        worst = std::max(worst, n);
    return detail::outcome("static cavity creates nothing (max |beta|, N)", worst, 1e-12);
}

inline CheckOutcome check_shift_invariance(const CheckOptions& o)
{
    double worst = 0.0;
    for (const auto& law : o.laws) {
        TruncationOptions t;
        t.n_max = o.n_max;
        t.s_max = default_s_max(o.n_max) * 2;
        t.max_escalations = 0;
        t.threads = o.threads;
        std::vector<BogoliubovRow> base, moved;
        spectrum(law, t, {}, &base);
        QuadratureSpec q;
        q.t_eval = law.duration() + 2.0 * law.static_length();
        spectrum(law, t, q, &moved);
        for (std::size_t k = 0; k < base.size(); ++k)
            for (std::size_t s = 0; s < base[k].betas.size(); ++s)
                worst = std::max(worst, std::abs(std::abs(moved[k].betas[s]) - std::abs(base[k].betas[s])));
    }
    return detail::outcome("|beta| invariant under t_eval -> t_eval + 2 L0", worst, 1e-9);
}

inline CheckOutcome check_density_doubling(const CheckOptions& o)
{
    double worst = 0.0;
    for (const auto& law : o.laws) {
        TruncationOptions t;
        t.n_max = o.n_max;
        t.threads = o.threads;
        QuadratureSpec dense;
        dense.panels_per_period *= 2.0;
        auto a = spectrum(law, t);
        auto b = spectrum(law, t, dense);
        for (int n = 1; n <= o.n_max; ++n)
            if (a.occupation(n) >= t.floor)
                worst = std::max(worst, std::abs(a.occupation(n) - b.occupation(n)) / a.occupation(n));
    }
    return detail::outcome("quadrature density doubling, relative change of N", worst, 1e-3);
}

inline CheckOutcome check_unitarity(const CheckOptions& o)
{
    double worst = 0.0;
    for (const auto& law : o.laws) {
        TruncationOptions t;
        t.n_max = o.n_max;
        t.threads = o.threads;
        worst = std::max(worst, spectrum(law, t).unitarity_defect);
    }
    return detail::outcome("unitarity defect at converged truncation", worst, kPassDefect);
}

inline CheckOutcome check_legendre_relation()
{
    double worst = 0.0;
    for (int i = 1; i < 1000; ++i) {
        double k = i / 1000.0;
        auto a = elliptic_KE(k);
        auto b = elliptic_KE(std::sqrt((1.0 - k) * (1.0 + k)));
        worst = std::max(worst, std::abs(a.E * b.K + b.E * a.K - a.K * b.K - 0.5 * std::numbers::pi));
    }
    return detail::outcome("Legendre relation E K' + E' K - K K' = pi/2", worst, 1e-10);
}

inline CheckOutcome check_preset(const std::filesystem::path& path, unsigned threads)
{
    auto cfg = load_config(path);
    cfg.threads = threads;
    auto rep = run(cfg);
    double worst = 0.0;
    bool converged = true;
    for (const auto& p : rep.points) {
        worst = std::max(worst, p.unitarity_defect);
        converged = converged && p.converged;
    }
    CheckOutcome out = detail::outcome("preset " + cfg.name + " unitarity defect", worst, kPassDefect);
    if (!converged) {
        out.passed = false;
        out.detail += ", some points not converged";
    }
    return out;
}

inline std::vector<CheckOutcome> run_invariant_suite(const CheckOptions& o)
{
    std::vector<CheckOutcome> out;
    out.push_back(check_moore_residual(o));
    out.push_back(check_unitarity(o));
    out.push_back(check_static_cavity(o));
    out.push_back(check_shift_invariance(o));
    out.push_back(check_density_doubling(o));
    out.push_back(check_legendre_relation());
    for (const auto& p : o.presets)
        out.push_back(check_preset(p, o.threads));
    return out;
}

} // namespace dce
