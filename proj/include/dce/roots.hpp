#pragma once

#include <cmath>
#include <sstream>
#include <utility>

#include "dce/errors.hpp"

namespace dce {

struct RootResult {
    double root = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Root of a continuous f on [lo, hi] with f(lo) <= 0 <= f(hi) or the reverse.
///
/// Each step tries a secant (regula falsi) point from the current bracket and
/// keeps it only if it falls strictly inside the bracket; a bisection step is
/// forced whenever the previous step failed to halve the bracket. The result
/// is within tol of a sign change of f. Throws internal_error if the endpoints
/// do not bracket a root.
template <class F>
RootResult find_root_bracketed(F&& f, double lo, double hi, double tol, int max_iter = 200)
{
    if (lo > hi)
        std::swap(lo, hi);
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0)
        return {lo, 0, true};
    if (fhi == 0.0)
        return {hi, 0, true};
    if ((flo > 0.0) == (fhi > 0.0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "find_root_bracketed: no sign change on [" << lo << ", " << hi << "], f = (" << flo
            << ", " << fhi << ")";
        throw internal_error(msg.str());
    }

    bool force_bisect = false;
    double last_width = hi - lo;
    for (int it = 1; it <= max_iter; ++it) {
        double width = hi - lo;
        if (width <= tol)
            return {lo + 0.5 * width, it - 1, true};

        double x;
        if (force_bisect) {
            x = lo + 0.5 * width;
        } else {
            x = lo - flo * width / (fhi - flo);
            if (!(x > lo && x < hi))
                x = lo + 0.5 * width;
        }

        double fx = f(x);
        if (fx == 0.0)
            return {x, it, true};
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }

        // a secant step that lands within tol of the root leaves a bracket
        // that is wide on one side; probe tol past it to close it.
        if (!force_bisect && hi - lo > tol) {
            double probe = (x == lo) ? x + 0.5 * tol : x - 0.5 * tol;
            if (probe > lo && probe < hi) {
                double fp = f(probe);
                if (fp == 0.0)
                    return {probe, it, true};
                if ((fp > 0.0) == (flo > 0.0)) {
                    lo = probe;
                    flo = fp;
                } else {
                    hi = probe;
                    fhi = fp;
                }
            }
        }

        double new_width = hi - lo;
        force_bisect = new_width > 0.5 * last_width;
        last_width = new_width;
    }
    return {lo + 0.5 * (hi - lo), max_iter, (hi - lo) <= tol};
}

} // namespace dce
