#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dce/analytic.hpp"
#include "dce/bogoliubov.hpp"
#include "dce/errors.hpp"
#include "dce/io.hpp"
#include "dce/parallel.hpp"
#include "dce/trajectory.hpp"

/// Declarative runs over grids of mirror laws.
///
/// Config files are flat `key = value` lines; `#` starts a comment. Grids are
/// comma separated lists or `start:step:stop` ranges (stop included).
///
///     name              output file stem                   (scenario)
///     kind              total_vs_T | spectrum | ratio_sweep | band_limit
///     L0                static cavity length               (1)
///     l0                oscillation period                 (L0; 1 for band_limit)
///     a | epsilon       amplitude, or a / L0
///     T                 duration                           (2 L0 for spectra)
///     T_grid            durations for total_vs_T
///     a_grid | v_grid   amplitudes or peak speeds for ratio_sweep
///     L0_pair           cavity lengths for band_limit      (1, 4)
///     n_max, s_max      truncation, 0 picks the defaults
///     panels_per_period, points_per_panel, tol_t, rel_tol, defect_tol,
///     max_escalations, threads
///     output_dir        where run writes CSVs              (none)
namespace dce {

enum class ScenarioKind { total_vs_T, spectrum, ratio_sweep, band_limit };

inline std::string to_string(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::total_vs_T: return "total_vs_T";
    case ScenarioKind::spectrum: return "spectrum";
    case ScenarioKind::ratio_sweep: return "ratio_sweep";
    case ScenarioKind::band_limit: return "band_limit";
    }
    return "?";
}

/// A run is PASS only if every point has a smaller unitarity defect.
inline constexpr double kPassDefect = 1e-3;

struct ScenarioConfig {
    std::string name = "scenario";
    ScenarioKind kind = ScenarioKind::spectrum;
    double L0 = 1.0;
    std::optional<double> l0;
    std::optional<double> amplitude;
    std::optional<double> epsilon;
    std::optional<double> T;
    std::vector<double> T_grid;
    std::vector<double> a_grid;
    std::vector<double> L0_pair{1.0, 4.0};
    int n_max = 0;
    int s_max = 0;
    QuadratureSpec quadrature;
    double tol_t = kDefaultTimeTolerance;
    double rel_tol = 1e-3;
    double defect_tol = 1e-3;
    int max_escalations = 4;
    unsigned threads = 1;
    std::string output_dir;

    double period() const
    {
        return l0.value_or(kind == ScenarioKind::band_limit ? 1.0 : L0);
    }

    double amplitude_for(double static_length) const
    {
        if (amplitude && epsilon)
            throw usage_error("config: give either a or epsilon, not both");
        if (amplitude)
            return *amplitude;
        if (epsilon)
            return *epsilon * static_length;
        throw usage_error("config: missing amplitude (a or epsilon)");
    }

    TruncationOptions truncation(double static_length, unsigned inner_threads) const
    {
        TruncationOptions o;
        o.n_max = n_max > 0 ? n_max : default_n_max(static_length);
        o.s_max = s_max;
        o.rel_tol = rel_tol;
        o.defect_tol = defect_tol;
        o.max_escalations = max_escalations;
        o.tol_t = tol_t;
        o.threads = inner_threads;
        return o;
    }
};

namespace detail {

inline std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& text, const std::string& key)
{
    std::string t = trim(text);
    try {
        std::size_t used = 0;
        double v = std::stod(t, &used);
        if (used == t.size() && std::isfinite(v))
            return v;
    } catch (const std::exception&) {
    }
    throw usage_error("config: " + key + ": not a number: '" + t + "'");
}

inline int parse_int(const std::string& text, const std::string& key)
{
    double v = parse_number(text, key);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw usage_error("config: " + key + ": not an integer: '" + trim(text) + "'");
    return static_cast<int>(v);
}

inline std::vector<double> parse_grid(const std::string& text, const std::string& key)
{
    std::vector<double> out;
    std::string t = trim(text);
    if (t.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(t);
        std::string item;
        while (std::getline(ss, item, ':'))
            parts.push_back(parse_number(item, key));
        if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0])
            throw usage_error("config: " + key + ": expected start:step:stop with step > 0");
        const auto count = static_cast<long>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
        for (long i = 0; i <= count; ++i)
            out.push_back(parts[0] + static_cast<double>(i) * parts[1]);
        return out;
    }
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_number(item, key));
    if (out.empty())
        throw usage_error("config: " + key + ": empty grid");
    return out;
}

inline ScenarioKind parse_kind(const std::string& v)
{
    for (auto k : {ScenarioKind::total_vs_T, ScenarioKind::spectrum, ScenarioKind::ratio_sweep,
                   ScenarioKind::band_limit})
        if (v == to_string(k))
            return k;
    throw usage_error("config: unknown kind '" + v + "'");
}

} // namespace detail

/// Every law the config implies; throws usage_error for any invalid one.
inline std::vector<MirrorLaw> implied_laws(const ScenarioConfig& c);

inline void validate(const ScenarioConfig& c)
{
    if (c.name.empty() || c.name.find('/') != std::string::npos)
        throw usage_error("config: name must be a plain file stem");
    if (c.quadrature.points_per_panel < 1 || !(c.quadrature.panels_per_period > 0.0))
        throw usage_error("config: quadrature density must be positive");
    if (c.n_max < 0 || c.s_max < 0 || c.max_escalations < 0)
        throw usage_error("config: truncation settings must be non-negative");
    if (c.quadrature.t_eval)
        throw usage_error("config: t_eval is fixed to T by the scenario runner");
    if (implied_laws(c).empty())
        throw usage_error("config: empty grid");
}

inline ScenarioConfig parse_config(std::istream& in)
{
    ScenarioConfig c;
    std::map<std::string, std::string> seen;
    std::string line;
    int lineno = 0;
    bool has_kind = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw usage_error("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (!seen.emplace(key, value).second)
            throw usage_error("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        if (key == "name") c.name = value;
        else if (key == "kind") { c.kind = detail::parse_kind(value); has_kind = true; }
        else if (key == "L0") c.L0 = detail::parse_number(value, key);
        else if (key == "l0") c.l0 = detail::parse_number(value, key);
        else if (key == "a") c.amplitude = detail::parse_number(value, key);
        else if (key == "epsilon") c.epsilon = detail::parse_number(value, key);
        else if (key == "T") c.T = detail::parse_number(value, key);
        else if (key == "T_grid") c.T_grid = detail::parse_grid(value, key);
        else if (key == "a_grid") c.a_grid = detail::parse_grid(value, key);
        else if (key == "v_grid") {
            if (seen.count("a_grid"))
                throw usage_error("config: give either a_grid or v_grid, not both");
            c.a_grid = detail::parse_grid(value, key);
            // converted once l0 is known
        }
        else if (key == "L0_pair") c.L0_pair = detail::parse_grid(value, key);
        else if (key == "n_max") c.n_max = detail::parse_int(value, key);
        else if (key == "s_max") c.s_max = detail::parse_int(value, key);
        else if (key == "panels_per_period") c.quadrature.panels_per_period = detail::parse_number(value, key);
        else if (key == "points_per_panel") c.quadrature.points_per_panel = detail::parse_int(value, key);
        else if (key == "tol_t") c.tol_t = detail::parse_number(value, key);
        else if (key == "rel_tol") c.rel_tol = detail::parse_number(value, key);
        else if (key == "defect_tol") c.defect_tol = detail::parse_number(value, key);
        else if (key == "max_escalations") c.max_escalations = detail::parse_int(value, key);
        else if (key == "threads") {
            int t = detail::parse_int(value, key);
            if (t < 0)
                throw usage_error("config: threads must be non-negative");
            c.threads = static_cast<unsigned>(t);
        }
        else if (key == "output_dir") c.output_dir = value;
        else
            throw usage_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (!has_kind)
        throw usage_error("config: missing kind");
    if (seen.count("v_grid") && seen.count("a_grid"))
        throw usage_error("config: give either a_grid or v_grid, not both");
    if (seen.count("v_grid"))
        for (double& v : c.a_grid)
            v *= c.period() / (2.0 * std::numbers::pi);
    validate(c);
    return c;
}

inline ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw usage_error("cannot open config " + path.string());
    return parse_config(in);
}

inline std::vector<MirrorLaw> implied_laws(const ScenarioConfig& c)
{
    std::vector<MirrorLaw> laws;
    const double l0 = c.period();
    auto require_double_length = [](double T, double L0) {
        if (std::abs(T - 2.0 * L0) > 1e-12 * L0)
            throw usage_error("config: spectra and ratios need T = 2 L0");
    };
    switch (c.kind) {
    case ScenarioKind::total_vs_T:
        if (c.T_grid.empty())
            throw usage_error("config: total_vs_T needs T_grid");
        if (std::abs(l0 - c.L0) > 1e-12 * c.L0)
            throw usage_error("config: total_vs_T compares with the resonant formula, needs l0 = L0");
        for (double T : c.T_grid)
            laws.emplace_back(c.L0, c.amplitude_for(c.L0), l0, T);
        break;
    case ScenarioKind::spectrum: {
        double T = c.T.value_or(2.0 * c.L0);
        require_double_length(T, c.L0);
        laws.emplace_back(c.L0, c.amplitude_for(c.L0), l0, T);
        break;
    }
    case ScenarioKind::band_limit:
        if (c.L0_pair.empty())
            throw usage_error("config: band_limit needs L0_pair");
        if (c.T)
            throw usage_error("config: band_limit sets T = 2 L0 per cavity");
        for (double L0 : c.L0_pair)
            laws.emplace_back(L0, c.amplitude_for(L0), l0, 2.0 * L0);
        break;
    case ScenarioKind::ratio_sweep: {
        if (c.a_grid.empty())
            throw usage_error("config: ratio_sweep needs a_grid or v_grid");
        if (std::abs(l0 - c.L0) > 1e-12 * c.L0)
            throw usage_error("config: ratio_sweep needs l0 = L0");
        double T = c.T.value_or(2.0 * c.L0);
        require_double_length(T, c.L0);
        for (double a : c.a_grid)
            laws.emplace_back(c.L0, a, l0, T);
        break;
    }
    }
    return laws;
}

struct PointReport {
    std::string label;
    MirrorLaw law;
    double unitarity_defect = 0.0;
    int escalations = 0;
    int s_max = 0;
    bool converged = false;
    std::string reason;
    double wall_seconds = 0.0;
};

struct GateCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct OutputFile {
    std::string name;
    std::string contents;
};

struct TotalPoint {
    double T = 0.0;
    double exact = 0.0;
    double approx = 0.0;
};

struct RatioPoint {
    double v = 0.0;
    double n1 = 0.0;
    double n3 = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();
};

struct RunReport {
    ScenarioConfig config;
    std::vector<PointReport> points;
    std::vector<GateCheck> checks;
    std::vector<OutputFile> outputs;
    std::vector<TotalPoint> totals;
    std::vector<SpectrumResult> spectra;
    std::vector<RatioPoint> ratios;

    bool passed() const
    {
        return std::all_of(points.begin(), points.end(),
                           [](const PointReport& p) { return p.converged && p.unitarity_defect < kPassDefect; })
            && std::all_of(checks.begin(), checks.end(), [](const GateCheck& g) { return g.passed; });
    }
};

namespace detail {

inline std::string format_number(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline std::string short_number(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline PointReport point_from(const std::string& label, const MirrorLaw& law, const SpectrumResult& s)
{
    return {label, law, s.unitarity_defect, s.convergence.escalations(), s.s_max,
            s.convergence.converged, s.convergence.reason, 0.0};
}

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline unsigned inner_threads(const ScenarioConfig& c, std::size_t points)
{
    return points == 1 ? c.threads : 1u;
}

} // namespace detail

inline RunReport run_total_vs_T(const ScenarioConfig& c)
{
    if (c.kind != ScenarioKind::total_vs_T)
        throw usage_error("run_total_vs_T: wrong scenario kind");
    auto laws = implied_laws(c);
    RunReport rep{c};
    rep.points.resize(laws.size(), PointReport{"", laws.front()});
    rep.totals.resize(laws.size());
    const unsigned inner = detail::inner_threads(c, laws.size());
    parallel_for(laws.size(), c.threads, [&](std::size_t i) {
        detail::Stopwatch clock;
        const auto& law = laws[i];
        auto exact = total_particles(law, c.truncation(law.static_length(), inner), c.quadrature);
        rep.totals[i] = {law.duration(), exact.value,
                         n_app_total(law.epsilon(), law.duration(), law.static_length())};
        rep.points[i] = detail::point_from("T=" + detail::short_number(law.duration()), law, exact.spectrum);
        rep.points[i].wall_seconds = clock.seconds();
    });
    std::ostringstream csv;
    csv.precision(17);
    csv << "T,N_exact,N_approx,abs_diff\n";
    for (const auto& p : rep.totals)
        csv << p.T << ',' << p.exact << ',' << p.approx << ',' << std::abs(p.exact - p.approx) << '\n';
    rep.outputs.push_back({c.name + ".csv", csv.str()});
    return rep;
}

inline RunReport run_spectrum(const ScenarioConfig& c)
{
    if (c.kind != ScenarioKind::spectrum && c.kind != ScenarioKind::band_limit)
        throw usage_error("run_spectrum: wrong scenario kind");
    auto laws = implied_laws(c);
    RunReport rep{c};
    rep.points.resize(laws.size(), PointReport{"", laws.front()});
    rep.spectra.resize(laws.size(), SpectrumResult{laws.front()});
    const unsigned inner = detail::inner_threads(c, laws.size());
    parallel_for(laws.size(), c.threads, [&](std::size_t i) {
        detail::Stopwatch clock;
        const auto& law = laws[i];
        rep.spectra[i] = spectrum(law, c.truncation(law.static_length(), inner), c.quadrature);
        rep.points[i] = detail::point_from("L0=" + detail::short_number(law.static_length())
                                               + " a=" + detail::short_number(law.amplitude()),
                                           law, rep.spectra[i]);
        rep.points[i].wall_seconds = clock.seconds();
    });
    for (std::size_t i = 0; i < laws.size(); ++i) {
        std::ostringstream csv;
        write_spectrum_csv(csv, rep.spectra[i]);
        std::string file = c.kind == ScenarioKind::spectrum
                             ? c.name + ".csv"
                             : c.name + "_L0_" + detail::short_number(laws[i].static_length()) + ".csv";
        rep.outputs.push_back({file, csv.str()});
    }
    return rep;
}

inline RunReport run_ratio_sweep(const ScenarioConfig& c)
{
    if (c.kind != ScenarioKind::ratio_sweep)
        throw usage_error("run_ratio_sweep: wrong scenario kind");
    auto laws = implied_laws(c);
    RunReport rep{c};
    rep.points.resize(laws.size(), PointReport{"", laws.front()});
    rep.ratios.resize(laws.size());
    const unsigned inner = detail::inner_threads(c, laws.size());
    parallel_for(laws.size(), c.threads, [&](std::size_t i) {
        detail::Stopwatch clock;
        const auto& law = laws[i];
        auto& point = rep.points[i];
        point = PointReport{"v=" + detail::short_number(law.max_velocity()), law};
        rep.ratios[i].v = law.max_velocity();
        try {
            auto r = band_ratio(law, c.quadrature, c.truncation(law.static_length(), inner));
            rep.ratios[i] = {law.max_velocity(), r.n1, r.n3, r.ratio};
            point.unitarity_defect = r.unitarity_defect;
            point.escalations = r.convergence.escalations();
            point.s_max = r.convergence.s_max_history.back();
            point.converged = r.convergence.converged;
            point.reason = r.convergence.reason;
        } catch (const undefined_ratio_error& e) {
            point.converged = false;
            point.reason = e.what();
        }
        point.wall_seconds = clock.seconds();
    });
    std::ostringstream csv;
    csv.precision(17);
    csv << "v,N1,N3,ratio\n";
    for (const auto& p : rep.ratios)
        csv << p.v << ',' << p.n1 << ',' << p.n3 << ',' << p.ratio << '\n';
    rep.outputs.push_back({c.name + ".csv", csv.str()});

    GateCheck monotone{"ratio increases with v", true, ""};
    for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
        const auto& lo = rep.ratios[i - 1];
        const auto& hi = rep.ratios[i];
        if (hi.v > lo.v && !(hi.ratio > lo.ratio)) {
            monotone.passed = false;
            monotone.detail = "ratio drops between v=" + detail::short_number(lo.v) + " and v="
                            + detail::short_number(hi.v);
        }
    }
    rep.checks.push_back(monotone);
    return rep;
}

inline RunReport run(const ScenarioConfig& c)
{
    validate(c);
    switch (c.kind) {
    case ScenarioKind::total_vs_T: return run_total_vs_T(c);
    case ScenarioKind::spectrum:
    case ScenarioKind::band_limit: return run_spectrum(c);
    case ScenarioKind::ratio_sweep: return run_ratio_sweep(c);
    }
    throw internal_error("run: unhandled scenario kind");
}

/// Human readable per-point summary, including wall times.
inline void write_report(std::ostream& os, const RunReport& rep)
{
    PrecisionGuard guard(os, 4);
    os << rep.config.name << " (" << to_string(rep.config.kind) << ")\n";
    for (const auto& p : rep.points) {
        os << "  " << p.label << ": defect=" << p.unitarity_defect << " s_max=" << p.s_max
           << " escalations=" << p.escalations << " wall=" << p.wall_seconds << "s "
           << (p.converged ? "converged" : "NOT converged");
        if (!p.reason.empty())
            os << " (" << p.reason << ')';
        os << '\n';
    }
    for (const auto& g : rep.checks) {
        os << "  check " << g.name << ": " << (g.passed ? "ok" : "FAILED");
        if (!g.detail.empty())
            os << " (" << g.detail << ')';
        os << '\n';
    }
    os << (rep.passed() ? "PASS" : "FAIL") << ' ' << rep.config.name << '\n';
}

/// Writes every output file into dir, creating it if needed.
inline void save_outputs(const RunReport& rep, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    for (const auto& f : rep.outputs) {
        std::ofstream out(dir / f.name, std::ios::binary);
        if (!out)
            throw usage_error("cannot write " + (dir / f.name).string());
        out << f.contents;
    }
}

} // namespace dce
