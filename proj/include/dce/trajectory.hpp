#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "dce/errors.hpp"

namespace dce {

namespace detail {

/// sin(pi*u) with the argument reduced to [-1, 1] first, so that integer u
/// yields an exact zero and large u loses no accuracy.
inline double sin_pi(double u) noexcept
{
    double r = std::remainder(u, 2.0);
    return std::sin(std::numbers::pi * r);
}

inline double cos_pi(double u) noexcept
{
    double r = std::remainder(u, 2.0);
    return std::cos(std::numbers::pi * r);
}

} // namespace detail

/// Trajectory of the moving mirror (units with c = 1):
///
///     L(t) = L0                          t < 0
///     L(t) = L0 + a sin(2 pi t / l0)     0 <= t <= T
///     L(t) = L0                          t > T
///
/// The constructor rejects laws that are superluminal (2 pi a / l0 >= 1),
/// that collapse the cavity (a >= L0) or that do not return to L0 at t = T
/// (2T / l0 must be an integer). a = 0 is accepted and describes a static
/// cavity. Instances are immutable.
class MirrorLaw {
public:
    MirrorLaw(double static_length, double amplitude, double period, double duration)
        : L0_(static_length), a_(amplitude), l0_(period), T_(duration)
    {
        auto finite = [](double v) { return std::isfinite(v); };
        if (!finite(L0_) || !finite(a_) || !finite(l0_) || !finite(T_))
            throw usage_error("MirrorLaw: parameters must be finite");
        if (L0_ <= 0.0)
            throw usage_error("MirrorLaw: L0 must be positive, got " + std::to_string(L0_));
        if (a_ < 0.0)
            throw usage_error("MirrorLaw: amplitude must be non-negative, got " + std::to_string(a_));
        if (l0_ <= 0.0)
            throw usage_error("MirrorLaw: period l0 must be positive, got " + std::to_string(l0_));
        if (T_ < 0.0)
            throw usage_error("MirrorLaw: duration T must be non-negative, got " + std::to_string(T_));
        if (a_ >= L0_)
            throw usage_error("MirrorLaw: amplitude must be smaller than L0");
        if (max_velocity() >= 1.0)
            throw usage_error("MirrorLaw: superluminal law, 2*pi*a/l0 = " + std::to_string(max_velocity()));

        double half_cycles = 2.0 * T_ / l0_;
        double nearest = std::round(half_cycles);
        if (std::abs(half_cycles - nearest) > 1e-9 * std::max(1.0, half_cycles))
            throw usage_error("MirrorLaw: 2T/l0 must be an integer so that L(T) = L0, got "
                              + std::to_string(half_cycles));
    }

    /// Resonant law a = epsilon * L0, l0 = L0.
    static MirrorLaw resonant(double epsilon, double static_length, double duration)
    {
        return MirrorLaw(static_length, epsilon * static_length, static_length, duration);
    }

    double static_length() const noexcept { return L0_; }
    double amplitude() const noexcept { return a_; }
    double period() const noexcept { return l0_; }
    double duration() const noexcept { return T_; }
    double omega0() const noexcept { return 2.0 * std::numbers::pi / l0_; }
    /// a / L0.
    double epsilon() const noexcept { return a_ / L0_; }

    double position(double t) const noexcept
    {
        if (t <= 0.0 || t >= T_)
            return L0_;
        return L0_ + a_ * detail::sin_pi(2.0 * t / l0_);
    }

    /// dL/dt. At t = 0 and t = T the interior branch is returned.
    double velocity(double t) const noexcept
    {
        if (t < 0.0 || t > T_ || a_ == 0.0)
            return 0.0;
        return max_velocity() * detail::cos_pi(2.0 * t / l0_);
    }

    double max_velocity() const noexcept { return 2.0 * std::numbers::pi * a_ / l0_; }

    friend bool operator==(const MirrorLaw&, const MirrorLaw&) = default;

private:
    double L0_;
    double a_;
    double l0_;
    double T_;
};

} // namespace dce
