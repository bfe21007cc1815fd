#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dce.hpp"

namespace {

namespace fs = std::filesystem;

struct LawArgs {
    double L0 = 1.0;
    std::optional<double> l0;
    double a = 0.0;
    std::optional<double> T;

    void add(CLI::App* cmd)
    {
        cmd->add_option("--L0", L0, "static cavity length")->capture_default_str();
        cmd->add_option("--l0", l0, "oscillation period (default L0)");
        cmd->add_option("--a", a, "oscillation amplitude")->required();
        cmd->add_option("--T", T, "oscillation duration (default 2 L0)");
    }

    dce::MirrorLaw law() const { return dce::MirrorLaw(L0, a, l0.value_or(L0), T.value_or(2.0 * L0)); }
};

/// Opens `path` for writing, or returns stdout for an empty path or "-".
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (path.empty() || path == "-")
            return;
        if (fs::path p(path); p.has_parent_path())
            fs::create_directories(p.parent_path());
        file_.open(path, std::ios::binary);
        if (!file_)
            throw dce::usage_error("cannot write " + path);
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

bool gate(const dce::SpectrumResult& res)
{
    return res.convergence.converged && res.unitarity_defect < dce::kPassDefect;
}

int cmd_run(const std::string& config, const std::string& out_dir, std::optional<unsigned> threads)
{
    auto cfg = dce::load_config(config);
    if (threads)
        cfg.threads = *threads;
    auto rep = dce::run(cfg);
    std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
    if (dir.empty()) {
        for (const auto& f : rep.outputs)
            std::cout << "## " << f.name << '\n' << f.contents;
        dce::write_report(std::cerr, rep);
    } else {
        dce::save_outputs(rep, dir);
        std::ofstream report(fs::path(dir) / (cfg.name + "_report.txt"));
        dce::write_report(report, rep);
        dce::write_report(std::cout, rep);
    }
    return rep.passed() ? 0 : 1;
}

int cmd_spectrum(const LawArgs& args, int n_max, int s_max, double ppp, unsigned threads,
                 const std::string& out, const std::string& coefficients)
{
    dce::MirrorLaw law = args.law();
    dce::TruncationOptions opts;
    opts.n_max = n_max > 0 ? n_max : dce::default_n_max(args.L0);
    opts.s_max = s_max;
    opts.threads = threads;
    dce::QuadratureSpec q;
    q.panels_per_period = ppp;
    std::vector<dce::BogoliubovRow> rows;
    auto res = dce::spectrum(law, opts, q, coefficients.empty() ? nullptr : &rows);
    Sink sink(out);
    dce::write_spectrum_csv(sink.stream(), res);
    if (!coefficients.empty()) {
        Sink coeff(coefficients);
        dce::write_coefficient_csv(coeff.stream(), rows);
    }
    std::cerr << (gate(res) ? "PASS" : "FAIL") << " spectrum: unitarity_defect=" << res.unitarity_defect
              << " s_max=" << res.s_max;
    if (!res.convergence.reason.empty())
        std::cerr << " (" << res.convergence.reason << ')';
    std::cerr << '\n';
    return gate(res) ? 0 : 1;
}

int cmd_ratio_sweep(double L0, const std::vector<double>& a_grid, const std::vector<double>& v_grid,
                    unsigned threads, const std::string& out)
{
    dce::ScenarioConfig cfg;
    cfg.name = "ratio_sweep";
    cfg.kind = dce::ScenarioKind::ratio_sweep;
    cfg.L0 = L0;
    cfg.threads = threads;
    if (!a_grid.empty() && !v_grid.empty())
        throw dce::usage_error("give either --a-grid or --v-grid");
    cfg.a_grid = a_grid;
    for (double v : v_grid)
        cfg.a_grid.push_back(v * L0 / (2.0 * std::numbers::pi));
    auto rep = dce::run(cfg);
    Sink sink(out);
    sink.stream() << rep.outputs.front().contents;
    dce::write_report(std::cerr, rep);
    return rep.passed() ? 0 : 1;
}

int cmd_check(const std::string& presets, std::size_t samples, unsigned threads)
{
    dce::CheckOptions opts;
    opts.moore_samples = samples;
    opts.threads = threads;
    if (!presets.empty()) {
        for (const auto& entry : fs::directory_iterator(presets))
            if (entry.path().extension() == ".cfg")
                opts.presets.push_back(entry.path());
        std::sort(opts.presets.begin(), opts.presets.end());
    }
    bool all = true;
    for (const auto& c : dce::run_invariant_suite(opts)) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        all = all && c.passed;
    }
    return all ? 0 : 1;
}

int cmd_moore(const LawArgs& args, double from, double to, std::size_t points, const std::string& out)
{
    dce::MirrorLaw law = args.law();
    Sink sink(out);
    dce::write_moore_csv(sink.stream(), law, from, to, points);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Particle creation in a one-dimensional cavity with an oscillating mirror"};
    app.require_subcommand(1);

    std::string config, out_dir;
    std::optional<unsigned> run_threads;
    auto* run = app.add_subcommand("run", "run a scenario config file");
    run->add_option("config", config, "scenario config")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory (overrides output_dir)");
    run->add_option("--threads", run_threads, "worker threads, 0 for all cores");

    LawArgs spec_law;
    int n_max = 0, s_max = 0;
    double ppp = dce::QuadratureSpec{}.panels_per_period;
    unsigned threads = 1;
    std::string out, coefficients;
    auto* spec = app.add_subcommand("spectrum", "occupation numbers N_n of one law");
    spec_law.add(spec);
    spec->add_option("--nmax", n_max, "highest output mode (default from L0)");
    spec->add_option("--smax", s_max, "initial in-mode truncation (default max(64, 8 nmax))");
    spec->add_option("--panels-per-period", ppp, "quadrature density")->capture_default_str();
    spec->add_option("--threads", threads, "worker threads, 0 for all cores");
    spec->add_option("--out", out, "CSV path, stdout if omitted");
    spec->add_option("--coefficients", coefficients, "also write alpha, beta to this CSV");

    double sweep_L0 = 1.0;
    std::vector<double> a_grid, v_grid;
    auto* sweep = app.add_subcommand("ratio-sweep", "N3/N1 over a grid of amplitudes, T = 2 L0");
    sweep->add_option("--L0", sweep_L0, "static length, l0 = L0")->capture_default_str();
    sweep->add_option("--a-grid", a_grid, "amplitudes")->delimiter(',');
    sweep->add_option("--v-grid", v_grid, "peak speeds 2 pi a / l0")->delimiter(',');
    sweep->add_option("--threads", threads, "worker threads, 0 for all cores");
    sweep->add_option("--out", out, "CSV path, stdout if omitted");

    std::string presets;
    std::size_t samples = 10000;
    auto* check = app.add_subcommand("check", "invariant suite");
    check->add_option("--presets", presets, "also run every *.cfg in this directory")
        ->check(CLI::ExistingDirectory);
    check->add_option("--samples", samples, "Moore residual samples per law")->capture_default_str();
    check->add_option("--threads", threads, "worker threads, 0 for all cores");

    LawArgs moore_law;
    double from = 0.0, to = 4.0;
    std::size_t points = 401;
    auto* moore = app.add_subcommand("moore", "dump R(z) on an even grid");
    moore_law.add(moore);
    moore->add_option("--from", from, "first z")->capture_default_str();
    moore->add_option("--to", to, "last z")->capture_default_str();
    moore->add_option("--points", points, "grid size")->capture_default_str();
    moore->add_option("--out", out, "CSV path, stdout if omitted");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return cmd_run(config, out_dir, run_threads);
        if (*spec)
            return cmd_spectrum(spec_law, n_max, s_max, ppp, threads, out, coefficients);
        if (*sweep)
            return cmd_ratio_sweep(sweep_L0, a_grid, v_grid, threads, out);
        if (*check)
            return cmd_check(presets, samples, threads);
        if (*moore)
            return cmd_moore(moore_law, from, to, points, out);
    } catch (const dce::usage_error& e) {
        std::cerr << "dce: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "dce: internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
