#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dce/errors.hpp"
#include "dce/moore.hpp"
#include "dce/parallel.hpp"
#include "dce/quadrature.hpp"
#include "dce/trajectory.hpp"

/// Bogoliubov coefficients between the static in-modes and the static
/// out-modes of the cavity, for output mode r and summed mode s:
///
///     beta_rs  = -1/2 sqrt(r/s) int_{t/L0-1}^{t/L0+1} dx exp(-i pi [s R(L0 x) + r x])
///     alpha_rs = +1/2 sqrt(r/s) int_{t/L0-1}^{t/L0+1} dx exp(-i pi [s R(L0 x) - r x])
///
/// N^(r) = sum_s |beta_rs|^2 and unitarity requires sum_s (|alpha_rs|^2 - |beta_rs|^2) = 1.
namespace dce {

using complex = std::complex<double>;

struct QuadratureSpec {
    /// Gauss-Legendre panels per local period of the fastest integrand
    /// oscillation exp(-i pi (s_max R'(z) L0 + n_max) x).
    double panels_per_period = 2.0;
    int points_per_panel = 8;
    /// Evaluation instant of the window integrals; T when unset.
    std::optional<double> t_eval;

    friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

inline double resolved_t_eval(const MirrorLaw& law, const QuadratureSpec& q)
{
    return q.t_eval.value_or(law.duration());
}

/// Largest mode indices a cache is resolved for.
struct ModeBounds {
    int n_max = 0;
    int s_max = 0;
};

/// Quadrature nodes of the coefficient window together with the memoized R
/// at each of them. Panel edges are placed at the kink images of R and
/// otherwise sized from the local slope of R, so every panel spans at most
/// 1 / panels_per_period of the local period of the fastest integrand.
class CoefficientCache {
public:
    static CoefficientCache build(const MirrorLaw& law, const QuadratureSpec& q, ModeBounds bounds,
                                  double tol_t = kDefaultTimeTolerance)
    {
        if (bounds.n_max < 1 || bounds.s_max < 1)
            throw usage_error("CoefficientCache: mode bounds must be positive");
        if (!(q.panels_per_period > 0.0) || q.points_per_panel < 1)
            throw usage_error("CoefficientCache: invalid quadrature spec");

        CoefficientCache c(law, q, bounds);
        const double L0 = law.static_length();
        c.t_eval_ = resolved_t_eval(law, q);
        c.x_lo_ = c.t_eval_ / L0 - 1.0;
        c.x_hi_ = c.t_eval_ / L0 + 1.0;

        c.breakpoints_.push_back(c.x_lo_);
        for (double z : kink_images(law, L0 * c.x_lo_, L0 * c.x_hi_, tol_t)) {
            double x = z / L0;
            if (x > c.x_lo_ + 1e-12 && x < c.x_hi_ - 1e-12)
                c.breakpoints_.push_back(x);
        }
        c.breakpoints_.push_back(c.x_hi_);

        // cycles per unit x of the fastest integrand at x
        auto frequency = [&](double x) {
            double slope = L0 * moore_sample(law, L0 * x, tol_t).slope;
            return 0.5 * (bounds.s_max * slope + bounds.n_max);
        };

        std::vector<double> edges{c.x_lo_};
        for (std::size_t k = 0; k + 1 < c.breakpoints_.size(); ++k) {
            const double end = c.breakpoints_[k + 1];
            double x = c.breakpoints_[k];
            while (x < end) {
                double f = frequency(x);
                double h = 1.0 / (q.panels_per_period * f);
                for (int it = 0; it < 6; ++it) {
                    double fm = std::max({f, frequency(std::min(x + 0.5 * h, end)),
                                          frequency(std::min(x + h, end))});
                    double h_new = 1.0 / (q.panels_per_period * fm);
                    if (h_new >= 0.999 * h)
                        break;
                    h = h_new;
                }
                x = (x + 1.25 * h >= end) ? end : x + h;
                edges.push_back(x);
            }
        }
        c.panels_ = edges.size() - 1;

        CompositeNodes nodes = composite(gauss_legendre(q.points_per_panel), edges);
        c.x_ = std::move(nodes.x);
        c.w_ = std::move(nodes.w);
        std::vector<double> z(c.x_.size());
        std::transform(c.x_.begin(), c.x_.end(), z.begin(), [L0](double x) { return L0 * x; });
        c.moore_ = build_cache(law, L0 * c.x_lo_, L0 * c.x_hi_, z, tol_t);
        return c;
    }

    const MirrorLaw& law() const noexcept { return law_; }
    const QuadratureSpec& spec() const noexcept { return spec_; }
    ModeBounds bounds() const noexcept { return bounds_; }
    double t_eval() const noexcept { return t_eval_; }
    double x_lo() const noexcept { return x_lo_; }
    double x_hi() const noexcept { return x_hi_; }
    std::size_t size() const noexcept { return x_.size(); }
    std::size_t panels() const noexcept { return panels_; }
    std::span<const double> x() const noexcept { return x_; }
    std::span<const double> weights() const noexcept { return w_; }
    std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    const MooreCache& moore() const noexcept { return moore_; }

private:
    CoefficientCache(const MirrorLaw& law, const QuadratureSpec& q, ModeBounds b)
        : law_(law), spec_(q), bounds_(b)
    {
    }

    MirrorLaw law_;
    QuadratureSpec spec_;
    ModeBounds bounds_;
    double t_eval_ = 0.0;
    double x_lo_ = 0.0;
    double x_hi_ = 0.0;
    std::size_t panels_ = 0;
    std::vector<double> breakpoints_;
    std::vector<double> x_;
    std::vector<double> w_;
    MooreCache moore_;
};

namespace detail {

/// exp(-i pi u) with u reduced mod 2.
inline complex unit_phase(double u) noexcept
{
    double r = std::remainder(u, 2.0);
    return {std::cos(std::numbers::pi * r), -std::sin(std::numbers::pi * r)};
}

inline void check_cache(const CoefficientCache& cache, const MirrorLaw& law, const QuadratureSpec& q,
                        int r, int s)
{
    if (!(cache.law() == law))
        throw usage_error("coefficient cache was built for a different law");
    if (!(cache.spec() == q) || resolved_t_eval(law, q) != cache.t_eval())
        throw usage_error("coefficient cache window or nodes do not match the quadrature spec");
    if (r < 1 || s < 1)
        throw usage_error("mode indices start at 1");
    if (r > cache.bounds().n_max || s > cache.bounds().s_max)
        throw usage_error("mode index exceeds the bounds the cache was resolved for");
}

} // namespace detail

struct CoefficientPair {
    complex alpha;
    complex beta;
};

/// Single (r, s) pair by direct pairwise-summed quadrature over the cached nodes.
inline CoefficientPair coefficient_pair(const CoefficientCache& cache, const MirrorLaw& law, int r,
                                        int s, const QuadratureSpec& q)
{
    detail::check_cache(cache, law, q, r, s);
    auto x = cache.x();
    auto w = cache.weights();
    auto nodes = cache.moore().nodes();
    std::vector<complex> a_terms(x.size());
    std::vector<complex> b_terms(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        complex g = w[j] * detail::unit_phase(s * nodes[j].R);
        complex e = detail::unit_phase(r * x[j]);
        b_terms[j] = g * e;
        a_terms[j] = g * std::conj(e);
    }
    double pref = 0.5 * std::sqrt(static_cast<double>(r) / s);
    return {pref * pairwise_sum<complex>(a_terms), -pref * pairwise_sum<complex>(b_terms)};
}

/// alpha_rs and beta_rs for one output mode r, s = 1..s_max (index s-1).
struct BogoliubovRow {
    int out_mode = 0;
    std::vector<complex> alphas;
    std::vector<complex> betas;

    int s_max() const noexcept { return static_cast<int>(betas.size()); }
};

/// Rows for the requested output modes. The integrals are evaluated as a
/// blocked complex matrix product: phases exp(-/+ i pi r x_j) (rows) times
/// weighted exp(-i pi s R_j) (columns), accumulated over node chunks in a
/// fixed order. Blocks of s are distributed over threads; each block owns
/// its output columns, so results do not depend on the thread count.
inline std::vector<BogoliubovRow> bogoliubov_rows(const CoefficientCache& cache,
                                                  std::span<const int> modes, int s_max,
                                                  unsigned threads = 1)
{
    using cmat = Eigen::Matrix<complex, Eigen::Dynamic, Eigen::Dynamic>;
    constexpr std::size_t kChunk = 512;
    constexpr int kBlock = 64;

    if (s_max < 1 || s_max > cache.bounds().s_max)
        throw usage_error("bogoliubov_rows: s_max outside the cache bounds");
    for (int r : modes)
        if (r < 1 || r > cache.bounds().n_max)
            throw usage_error("bogoliubov_rows: output mode outside the cache bounds");

    const auto x = cache.x();
    const auto w = cache.weights();
    const auto nodes = cache.moore().nodes();
    const std::size_t n_nodes = x.size();
    const auto m = static_cast<Eigen::Index>(modes.size());
    const std::size_t n_blocks = (static_cast<std::size_t>(s_max) + kBlock - 1) / kBlock;

    cmat acc = cmat::Zero(2 * m, s_max);
    cmat phases(2 * m, static_cast<Eigen::Index>(kChunk));
    std::vector<cmat> columns(std::min<std::size_t>(resolve_threads(threads), n_blocks) > 1 ? n_blocks : 1);

    for (std::size_t j0 = 0; j0 < n_nodes; j0 += kChunk) {
        const std::size_t len = std::min(kChunk, n_nodes - j0);
        const auto c = static_cast<Eigen::Index>(len);
        for (std::size_t jj = 0; jj < len; ++jj) {
            for (Eigen::Index k = 0; k < m; ++k) {
                complex e = detail::unit_phase(modes[k] * x[j0 + jj]);
                phases(k, static_cast<Eigen::Index>(jj)) = e;
                phases(m + k, static_cast<Eigen::Index>(jj)) = std::conj(e);
            }
        }
        parallel_for(n_blocks, threads, [&](std::size_t b) {
            const int s0 = static_cast<int>(b) * kBlock + 1;
            const int width = std::min(kBlock, s_max - s0 + 1);
            cmat& g = columns[columns.size() == 1 ? 0 : b];
            g.resize(c, width);
            for (std::size_t jj = 0; jj < len; ++jj) {
                const double R = nodes[j0 + jj].R;
                const complex step = detail::unit_phase(R);
                complex v = w[j0 + jj] * detail::unit_phase(s0 * R);
                for (int k = 0; k < width; ++k) {
                    g(static_cast<Eigen::Index>(jj), k) = v;
                    v *= step;
                }
            }
            acc.middleCols(s0 - 1, width).noalias() += phases.leftCols(c) * g;
        });
    }

    std::vector<BogoliubovRow> rows(modes.size());
    for (Eigen::Index k = 0; k < m; ++k) {
        BogoliubovRow& row = rows[k];
        row.out_mode = modes[k];
        row.alphas.resize(s_max);
        row.betas.resize(s_max);
        for (int s = 1; s <= s_max; ++s) {
            double pref = 0.5 * std::sqrt(static_cast<double>(modes[k]) / s);
            row.betas[s - 1] = -pref * acc(k, s - 1);
            row.alphas[s - 1] = pref * acc(m + k, s - 1);
        }
    }
    return rows;
}

inline double row_occupation(const BogoliubovRow& row)
{
    std::vector<double> sq(row.betas.size());
    std::transform(row.betas.begin(), row.betas.end(), sq.begin(), [](complex b) { return std::norm(b); });
    return pairwise_sum<double>(sq);
}

inline double row_unitarity_defect(const BogoliubovRow& row)
{
    std::vector<double> d(row.betas.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = std::norm(row.alphas[i]) - std::norm(row.betas[i]);
    return std::abs(pairwise_sum<double>(d) - 1.0);
}

/// N^(r) = sum_{s <= s_max} |beta_rs|^2 on a prebuilt cache.
inline double mode_occupation(const CoefficientCache& cache, const MirrorLaw& law, int r, int s_max,
                              const QuadratureSpec& q, unsigned threads = 1)
{
    detail::check_cache(cache, law, q, r, s_max);
    const int mode[] = {r};
    return row_occupation(bogoliubov_rows(cache, mode, s_max, threads).front());
}

/// |sum_s (|alpha_ms|^2 - |beta_ms|^2) - 1| for output mode m.
inline double unitarity_defect(const CoefficientCache& cache, const MirrorLaw& law, int m, int s_max,
                               const QuadratureSpec& q, unsigned threads = 1)
{
    detail::check_cache(cache, law, q, m, s_max);
    const int mode[] = {m};
    return row_unitarity_defect(bogoliubov_rows(cache, mode, s_max, threads).front());
}

// ---------------------------------------------------------------------------
// Truncated spectra with adaptive s_max escalation

inline int default_s_max(int n_max) { return std::max(64, 8 * n_max); }

inline int default_n_max(double L0)
{
    return std::max(40, 20 * static_cast<int>(std::ceil(L0)));
}

struct TruncationOptions {
    int n_max = 40;
    /// 0 selects default_s_max(n_max).
    int s_max = 0;
    double rel_tol = 1e-3;
    double defect_tol = 1e-3;
    /// Occupations below this are noise for the convergence test.
    double floor = 1e-12;
    int max_escalations = 4;
    double tol_t = kDefaultTimeTolerance;
    unsigned threads = 1;
};

struct ConvergenceInfo {
    bool converged = false;
    /// s_max of every pass, the last one is the reported truncation.
    std::vector<int> s_max_history;
    double max_relative_change = std::numeric_limits<double>::quiet_NaN();
    /// max(N^(n_max - 1), N^(n_max)) / total, a proxy for the mode truncation
    /// error of totals. Both parities are needed because resonant spectra
    /// suppress even modes.
    double tail_ratio = 0.0;
    std::string reason;

    int escalations() const noexcept
    {
        return s_max_history.empty() ? 0 : static_cast<int>(s_max_history.size()) - 1;
    }
};

struct SpectrumResult {
    MirrorLaw law;
    QuadratureSpec quadrature;
    std::vector<double> occupations; ///< N^(n) at index n - 1
    std::vector<double> row_defects;
    double total = 0.0;
    double unitarity_defect = 0.0; ///< max over rows
    int n_max = 0;
    int s_max = 0;
    std::size_t nodes = 0;
    ConvergenceInfo convergence;

    double occupation(int n) const { return occupations.at(static_cast<std::size_t>(n - 1)); }
};

namespace detail {

struct Pass {
    std::vector<double> occupations;
    std::vector<double> defects;
    std::vector<BogoliubovRow> rows;
    int s_max = 0;
    std::size_t nodes = 0;
};

inline Pass evaluate_pass(const MirrorLaw& law, const QuadratureSpec& q, std::span<const int> modes,
                          int s_max, const TruncationOptions& opts, bool keep_rows)
{
    int r_max = *std::max_element(modes.begin(), modes.end());
    auto cache = CoefficientCache::build(law, q, {r_max, s_max}, opts.tol_t);
    auto rows = bogoliubov_rows(cache, modes, s_max, opts.threads);
    Pass p;
    p.s_max = s_max;
    p.nodes = cache.size();
    for (const auto& row : rows) {
        p.occupations.push_back(row_occupation(row));
        p.defects.push_back(row_unitarity_defect(row));
    }
    if (keep_rows)
        p.rows = std::move(rows);
    return p;
}

struct Converged {
    Pass pass;
    ConvergenceInfo info;
};

/// Doubles s_max until the unitarity defect is below defect_tol and no
/// occupation moves by more than rel_tol between consecutive passes.
inline Converged converge(const MirrorLaw& law, const QuadratureSpec& q, std::span<const int> modes,
                          const TruncationOptions& opts, bool keep_rows)
{
    int r_max = *std::max_element(modes.begin(), modes.end());
    int s = opts.s_max > 0 ? opts.s_max : default_s_max(r_max);
    Converged out;
    out.pass = evaluate_pass(law, q, modes, s, opts, keep_rows);
    out.info.s_max_history.push_back(s);

    auto defect_ok = [&](const Pass& p) {
        return *std::max_element(p.defects.begin(), p.defects.end()) < opts.defect_tol;
    };

    if (opts.max_escalations <= 0) {
        out.info.converged = defect_ok(out.pass);
        if (!out.info.converged)
            out.info.reason = "unitarity defect above tolerance (no escalation allowed)";
        return out;
    }

    for (int k = 0; k < opts.max_escalations; ++k) {
        s *= 2;
        Pass next = evaluate_pass(law, q, modes, s, opts, keep_rows);
        out.info.s_max_history.push_back(s);
        bool change_ok = true;
        double worst = 0.0;
        for (std::size_t i = 0; i < next.occupations.size(); ++i) {
            double diff = std::abs(next.occupations[i] - out.pass.occupations[i]);
            if (diff > opts.rel_tol * next.occupations[i] + opts.floor)
                change_ok = false;
            if (next.occupations[i] > opts.floor)
                worst = std::max(worst, diff / next.occupations[i]);
        }
        out.info.max_relative_change = worst;
        out.pass = std::move(next);
        if (change_ok && defect_ok(out.pass)) {
            out.info.converged = true;
            return out;
        }
    }
    std::ostringstream why;
    why << "not converged at s_max = " << s << " (max relative change " << out.info.max_relative_change
        << ", max unitarity defect "
        << *std::max_element(out.pass.defects.begin(), out.pass.defects.end()) << ")";
    out.info.reason = why.str();
    return out;
}

inline void require_post_motion(const MirrorLaw& law, const QuadratureSpec& q)
{
    if (resolved_t_eval(law, q) < law.duration())
        throw usage_error("coefficients must be evaluated at t_eval >= T");
}

} // namespace detail

/// Occupations N^(1..n_max), total and unitarity defect with s_max escalation.
/// Non-convergence is reported in `convergence`, never thrown.
inline SpectrumResult spectrum(const MirrorLaw& law, const TruncationOptions& opts,
                               const QuadratureSpec& q = {}, std::vector<BogoliubovRow>* rows_out = nullptr)
{
    detail::require_post_motion(law, q);
    if (opts.n_max < 1)
        throw usage_error("spectrum: n_max must be at least 1");
    std::vector<int> modes(opts.n_max);
    for (int r = 1; r <= opts.n_max; ++r)
        modes[r - 1] = r;

    auto conv = detail::converge(law, q, modes, opts, rows_out != nullptr);
    SpectrumResult res{law, q};
    res.occupations = std::move(conv.pass.occupations);
    res.row_defects = std::move(conv.pass.defects);
    res.total = pairwise_sum<double>(res.occupations);
    res.unitarity_defect = *std::max_element(res.row_defects.begin(), res.row_defects.end());
    res.n_max = opts.n_max;
    res.s_max = conv.pass.s_max;
    res.nodes = conv.pass.nodes;
    res.convergence = std::move(conv.info);
    double tail = res.occupations.back();
    if (res.occupations.size() > 1)
        tail = std::max(tail, res.occupations[res.occupations.size() - 2]);
    res.convergence.tail_ratio = res.total > opts.floor ? tail / res.total : 0.0;
    if (rows_out)
        *rows_out = std::move(conv.pass.rows);
    return res;
}

/// Total number of created particles, sum_{r <= n_max} N^(r). In addition to
/// the spectrum criteria, the run is flagged when the last mode still holds
/// more than rel_tol of the total.
struct ParticleTotal {
    double value = 0.0;
    SpectrumResult spectrum;
};

inline ParticleTotal total_particles(const MirrorLaw& law, const TruncationOptions& opts,
                                     const QuadratureSpec& q = {})
{
    ParticleTotal out{0.0, spectrum(law, opts, q)};
    out.value = out.spectrum.total;
    auto& conv = out.spectrum.convergence;
    if (conv.tail_ratio > opts.rel_tol) {
        conv.converged = false;
        std::ostringstream why;
        why << "mode truncation: tail/total = " << conv.tail_ratio;
        conv.reason = conv.reason.empty() ? why.str() : conv.reason + "; " + why.str();
    }
    return out;
}

class undefined_ratio_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct BandRatio {
    double n1 = 0.0;
    double n3 = 0.0;
    double ratio = 0.0;
    double unitarity_defect = 0.0;
    ConvergenceInfo convergence;
};

/// N^(3) / N^(1) for a law with T = 2 L0. Throws undefined_ratio_error when
/// N^(1) is below the noise floor.
inline BandRatio band_ratio(const MirrorLaw& law, const QuadratureSpec& q = {},
                            TruncationOptions opts = {})
{
    const double L0 = law.static_length();
    if (std::abs(law.duration() - 2.0 * L0) > 1e-12 * L0)
        throw usage_error("band_ratio: requires T = 2 L0");
    detail::require_post_motion(law, q);
    const int modes[] = {1, 3};
    auto conv = detail::converge(law, q, modes, opts, false);
    BandRatio out;
    out.n1 = conv.pass.occupations[0];
    out.n3 = conv.pass.occupations[1];
    out.unitarity_defect = std::max(conv.pass.defects[0], conv.pass.defects[1]);
    out.convergence = std::move(conv.info);
    if (!(out.n1 > opts.floor))
        throw undefined_ratio_error("band_ratio: N^(1) below the noise floor");
    out.ratio = out.n3 / out.n1;
    return out;
}

} // namespace dce
