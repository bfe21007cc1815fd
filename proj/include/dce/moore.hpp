#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <sstream>
#include <vector>

#include "dce/errors.hpp"
#include "dce/roots.hpp"
#include "dce/trajectory.hpp"

/// Moore function R(z) of a cavity with one moving mirror.
///
/// R solves R(t + L(t)) - R(t - L(t)) = 2 with R(z) = z / L0 for z <= L0.
/// For z > L0 the null line is traced backwards: each reflection off the
/// mirror at instant t_i (t_i + L(t_i) = z_{i-1}) maps z_{i-1} to
/// z_i = z_{i-1} - 2 L(t_i), until z_n <= L0. Then
///
///     R(z) = 2n + (z - 2 sum_i L(t_i)) / L0.
namespace dce {

inline constexpr double kDefaultTimeTolerance = 1e-12;

struct Reflection {
    double t;      ///< instant the null line meets the mirror
    double z_next; ///< null coordinate after reflecting off x = 0
};

/// Single backward reflection for z > L0. Since |L'| < 1, t + L(t) is strictly
/// increasing and the root is bracketed by [z - L0 - a, z - L0 + a].
inline Reflection reflect_back(const MirrorLaw& law, double z, double tol_t = kDefaultTimeTolerance)
{
    const double L0 = law.static_length();
    const double a = law.amplitude();
    if (!(z > L0))
        throw usage_error("reflect_back: z must exceed L0 (z <= L0 lies in the static zone)");
    auto g = [&](double t) { return t + law.position(t) - z; };
    double lo = z - L0 - a;
    double hi = z - L0 + a;
    RootResult res = (lo == hi) ? RootResult{lo, 0, true} : find_root_bracketed(g, lo, hi, tol_t);
    if (!res.converged) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "reflect_back: root finder did not converge for z = " << z;
        throw internal_error(msg.str());
    }
    return {res.root, z - 2.0 * law.position(res.root)};
}

namespace detail {

inline std::size_t reflection_cap(const MirrorLaw& law, double z)
{
    double step = 2.0 * (law.static_length() - law.amplitude());
    return static_cast<std::size_t>(std::ceil(std::max(z, 0.0) / step)) + 8;
}

[[noreturn]] inline void reflection_cap_exceeded(double z)
{
    std::ostringstream msg;
    msg.precision(17);
    msg << "moore: reflection count cap exceeded for z = " << z;
    throw internal_error(msg.str());
}

} // namespace detail

/// Full backward trace of a null coordinate.
struct ReflectionTrace {
    std::vector<double> instants; ///< t_1 > t_2 > ... > t_n
    double terminal_z = 0.0;      ///< z - 2 sum L(t_i), always <= L0

    std::size_t count() const noexcept { return instants.size(); }
};

inline ReflectionTrace trace_reflections(const MirrorLaw& law, double z,
                                         double tol_t = kDefaultTimeTolerance)
{
    ReflectionTrace trace;
    const std::size_t cap = detail::reflection_cap(law, z);
    double cur = z;
    while (cur > law.static_length()) {
        if (trace.instants.size() >= cap)
            detail::reflection_cap_exceeded(z);
        Reflection r = reflect_back(law, cur, tol_t);
        trace.instants.push_back(r.t);
        cur = r.z_next;
    }
    trace.terminal_z = cur;
    return trace;
}

/// R together with dR/dz and the number of reflections n(z).
/// The slope is the product of the Doppler factors (1 - L'(t_i)) / (1 + L'(t_i))
/// divided by L0; at kink images it is the one-sided value picked by velocity().
struct MooreSample {
    double R;
    double slope;
    int reflections;
};

inline MooreSample moore_sample(const MirrorLaw& law, double z, double tol_t = kDefaultTimeTolerance)
{
    const double L0 = law.static_length();
    if (z <= L0)
        return {z / L0, 1.0 / L0, 0};

    const std::size_t cap = detail::reflection_cap(law, z);
    double cur = z;
    double sum_L = 0.0;
    double doppler = 1.0;
    int n = 0;
    while (cur > L0) {
        if (static_cast<std::size_t>(n) >= cap)
            detail::reflection_cap_exceeded(z);
        Reflection r = reflect_back(law, cur, tol_t);
        double v = law.velocity(r.t);
        doppler *= (1.0 - v) / (1.0 + v);
        sum_L += law.position(r.t);
        cur = r.z_next;
        ++n;
    }
    return {2.0 * n + (z - 2.0 * sum_L) / L0, doppler / L0, n};
}

inline double moore_R(const MirrorLaw& law, double z, double tol_t = kDefaultTimeTolerance)
{
    return moore_sample(law, z, tol_t).R;
}

/// Null coordinates in [z_lo, z_hi] where R has a slope discontinuity: forward
/// images of the velocity jumps at t = 0 and t = T. A kink at z propagates to
/// t' + L(t') where t' - L(t') = z (next hit of the mirror after bouncing off x = 0).
inline std::vector<double> kink_images(const MirrorLaw& law, double z_lo, double z_hi,
                                       double tol_t = kDefaultTimeTolerance)
{
    std::vector<double> out;
    if (law.amplitude() == 0.0)
        return out;
    const double L0 = law.static_length();
    const double a = law.amplitude();
    for (double t0 : {0.0, law.duration()}) {
        double z = t0 + law.position(t0);
        while (z <= z_hi) {
            if (z >= z_lo)
                out.push_back(z);
            auto h = [&](double t) { return t - law.position(t) - z; };
            double lo = z + L0 - a;
            double hi = z + L0 + a;
            RootResult res = find_root_bracketed(h, lo, hi, tol_t);
            z = res.root + law.position(res.root);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [&](double x, double y) { return std::abs(x - y) <= 4.0 * tol_t; }),
              out.end());
    return out;
}

struct MooreNode {
    double z;
    double R;
};

/// Memo of R over a window of null coordinates. R does not depend on the
/// mode indices, so one evaluation per quadrature node serves every
/// Bogoliubov coefficient.
class MooreCache {
public:
    MooreCache() = default;

    double z_lo() const noexcept { return z_lo_; }
    double z_hi() const noexcept { return z_hi_; }
    std::span<const MooreNode> nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    friend MooreCache build_cache(const MirrorLaw& law, double z_lo, double z_hi,
                                  std::span<const double> abscissae, double tol_t);

private:
    double z_lo_ = 0.0;
    double z_hi_ = 0.0;
    std::vector<MooreNode> nodes_;
};

/// Evaluates R at every abscissa (ascending, inside [z_lo, z_hi]). Throws
/// internal_error if the computed R is not strictly increasing, which means
/// tol_t is too loose for the node spacing.
inline MooreCache build_cache(const MirrorLaw& law, double z_lo, double z_hi,
                              std::span<const double> abscissae,
                              double tol_t = kDefaultTimeTolerance)
{
    if (!std::is_sorted(abscissae.begin(), abscissae.end()))
        throw usage_error("build_cache: abscissae must be sorted ascending");
    if (!abscissae.empty() && (abscissae.front() < z_lo || abscissae.back() > z_hi))
        throw usage_error("build_cache: abscissae fall outside the window");

    MooreCache cache;
    cache.z_lo_ = z_lo;
    cache.z_hi_ = z_hi;
    cache.nodes_.reserve(abscissae.size());
    for (double z : abscissae) {
        double R = moore_R(law, z, tol_t);
        if (!cache.nodes_.empty() && !(R > cache.nodes_.back().R) && z > cache.nodes_.back().z) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "build_cache: R not increasing between z = " << cache.nodes_.back().z
                << " and z = " << z;
            throw internal_error(msg.str());
        }
        cache.nodes_.push_back({z, R});
    }
    return cache;
}

inline MooreCache build_cache(const MirrorLaw& law, std::span<const double> abscissae,
                              double tol_t = kDefaultTimeTolerance)
{
    if (abscissae.empty())
        return build_cache(law, 0.0, 0.0, abscissae, tol_t);
    return build_cache(law, abscissae.front(), abscissae.back(), abscissae, tol_t);
}

/// Debug dump, columns z,R,n_reflections over an evenly spaced grid.
inline void write_moore_csv(std::ostream& os, const MirrorLaw& law, double z_lo, double z_hi,
                            std::size_t points, double tol_t = kDefaultTimeTolerance)
{
    auto old_prec = os.precision(17);
    os << "z,R,n_reflections\n";
    for (std::size_t i = 0; i < points; ++i) {
        double z = points == 1 ? z_lo
                               : z_lo + (z_hi - z_lo) * static_cast<double>(i)
                                            / static_cast<double>(points - 1);
        MooreSample s = moore_sample(law, z, tol_t);
        os << z << ',' << s.R << ',' << s.reflections << '\n';
    }
    os.precision(old_prec);
}

} // namespace dce
