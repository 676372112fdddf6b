// hydro: ingest, diagnose, fit, simulate and forecast daily inflow series.

#include "hydro/diagnostics.hpp"
#include "hydro/errors.hpp"
#include "hydro/fixture.hpp"
#include "hydro/forecaster.hpp"
#include "hydro/harmonic.hpp"
#include "hydro/series.hpp"
#include "hydro/simulator.hpp"
#include "hydro/trend.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hydro;

namespace {

// Options shared by every subcommand; also accepted from --config as flat key = value lines.
struct RunConfig {
    double lambda = trend::kDefaultLambda;
    double gamma = 0.0;
    std::optional<double> rms_tol;
    std::optional<std::size_t> fixed_count;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 0;
    std::string multipliers = "0.5:2.6:0.1";
    std::string periods;
    std::optional<std::size_t> horizon;
    unsigned threads = 0;
    std::string output_dir = ".";
};

struct Period {
    Date start;
    Date end;
};

std::vector<Period> parse_periods(const std::string& text) {
    std::vector<Period> out;
    if (text.empty()) return out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const auto item = text.substr(pos, comma - pos);
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("period '" + item + "' must be START:END");
        const Period p{parse_date(item.substr(0, colon)), parse_date(item.substr(colon + 1))};
        if (p.end < p.start) throw ConfigError("period '" + item + "' ends before it starts");
        out.push_back(p);
        pos = comma + 1;
    }
    return out;
}

harmonic::FitConfig fit_config(const RunConfig& rc) {
    harmonic::FitConfig c;
    c.lambda = rc.lambda;
    c.gamma = rc.gamma;
    if (rc.fixed_count) {
        c.truncation = harmonic::TruncationCriterion::count(*rc.fixed_count);
    } else {
        c.truncation = harmonic::TruncationCriterion::tolerance(rc.rms_tol.value_or(harmonic::kDefaultRmsTolerance));
    }
    if (!(c.lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (c.gamma < 0.0) throw ConfigError("gamma must be non-negative");
    return c;
}

json config_json(const RunConfig& rc) {
    json j{{"lambda", rc.lambda},   {"gamma", rc.gamma},         {"n_paths", rc.n_paths},
           {"seed", rc.seed},       {"multipliers", rc.multipliers}, {"periods", rc.periods},
           {"threads", rc.threads}};
    if (rc.fixed_count) {
        j["truncation"] = {{"fixed_count", *rc.fixed_count}};
    } else {
        j["truncation"] = {{"rms_tol", rc.rms_tol.value_or(harmonic::kDefaultRmsTolerance)}};
    }
    j["horizon"] = rc.horizon ? json(*rc.horizon) : json(nullptr);
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.close();
    if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

TimeSeries read_input(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("cannot read " + path.string());
    return read_series_csv(path);
}

// ---- ingest ----

struct IngestArgs {
    std::vector<std::string> inputs;
    std::string output = "system.csv";
    CsvSchema schema;
    bool no_log = false;
    bool interpolate = false;
    int max_gap = 3;
};

void cmd_ingest(const IngestArgs& a, const RunConfig&) {
    std::vector<RiverRecord> records;
    for (const auto& in : a.inputs) {
        if (!fs::exists(in)) throw IoError("cannot read " + in);
        auto r = ingest_csv(in, a.schema);
        records.insert(records.end(), r.begin(), r.end());
    }
    auto series = aggregate_system(records, GapPolicy{a.interpolate, a.max_gap});
    if (!a.no_log) series = log_transform(series);
    write_series_csv(a.output, series);
    std::cerr << "wrote " << series.size() << " days (" << format_date(series.start_date()) << " to "
              << format_date(series.end_date()) << ") to " << a.output << "\n";
}

// ---- test ----

struct TestArgs {
    std::string input;
    std::optional<std::size_t> adf_max_lag;
    std::vector<std::size_t> vr_horizons{2, 4, 8, 16};
};

void cmd_test(const TestArgs& a, const RunConfig& rc) {
    const auto series = read_input(a.input);
    auto periods = parse_periods(rc.periods);
    if (periods.empty()) periods.push_back({series.start_date(), series.end_date()});

    diagnostics::ReportOptions opts;
    opts.adf_max_lag = a.adf_max_lag;
    opts.vr_horizons = a.vr_horizons;
    opts.simultaneous_tests = periods.size();

    std::vector<diagnostics::TestReport> reports;
    json out_reports = json::array();
    for (const auto& p : periods) {
        const auto slice = slice_period(series, p.start, p.end);
        const TimeSeries labelled(slice.start_date(), slice.values(), slice.dt_years(),
                                  format_date(p.start) + ":" + format_date(p.end));
        reports.push_back(diagnostics::run_diagnostics(labelled, opts));
        out_reports.push_back(diagnostics::to_json(reports.back()));
    }
    json cfg = config_json(rc);
    cfg["input"] = a.input;
    cfg["adf_max_lag"] = a.adf_max_lag ? json(*a.adf_max_lag) : json(nullptr);
    cfg["vr_horizons"] = a.vr_horizons;
    const auto table = diagnostics::format_table(reports);
    const fs::path dir = rc.output_dir;
    write_json(dir / "tests.json", {{"config", cfg}, {"reports", out_reports}});
    write_text(dir / "tests.txt", table);
    std::cout << table;
}

// ---- fit ----

struct FitArgs {
    std::string input;
    std::string period;
    bool dump_rms = false;
};

void cmd_fit(const FitArgs& a, const RunConfig& rc) {
    auto series = read_input(a.input);
    if (!a.period.empty()) {
        const auto p = parse_periods(a.period);
        if (p.size() != 1) throw ConfigError("--period takes exactly one START:END range");
        series = slice_period(series, p[0].start, p[0].end);
    }
    const auto f = harmonic::fit(series, fit_config(rc));

    json j = harmonic::to_json(f);
    json cfg = config_json(rc);
    cfg["input"] = a.input;
    cfg["period"] = a.period;
    j["config"] = cfg;
    const fs::path dir = rc.output_dir;
    write_json(dir / "fit.json", j);

    std::string harmonics = "k,a,phi\n";
    for (const auto& t : f.harmonics.terms) harmonics += std::to_string(t.k) + "," + num(t.amplitude) + "," + num(t.phase) + "\n";
    write_text(dir / "harmonics.csv", harmonics);

    std::string trend = "index,date,value,trend,trend_derivative\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        trend += std::to_string(i) + "," + format_date(series.date_at(i)) + "," + num(series[i]) + "," +
                 num(f.trend.m[i]) + "," + num(f.trend.m_dot[i]) + "\n";
    }
    write_text(dir / "trend.csv", trend);

    if (a.dump_rms) {
        std::string rms = "L,rms\n";
        for (const auto& p : f.rms_trace) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.9f", p.rms);
            rms += std::to_string(p.harmonics) + "," + buf + "\n";
        }
        write_text(dir / "rms_trace.csv", rms);
    }
    std::cout << "alpha " << num(f.phase2.alpha) << "  sigma " << num(f.phase2.sigma) << "  (phase 1: "
              << num(f.phase1.alpha) << ", " << num(f.phase1.sigma) << ")  harmonics " << f.harmonics.terms.size() - 1
              << "  sigma_H " << num(f.sigma_H) << "\n";
}

// ---- simulate / forecast ----

struct EnsembleArgs {
    std::string fit;
    std::string holdout;
    bool write_paths = false;
};

harmonic::ModelFit load_fit(const std::string& path) { return harmonic::model_fit_from_json(read_json(path)); }

sim::SimulationEnsemble run_ensemble(const harmonic::ModelFit& f, const RunConfig& rc) {
    auto cfg = forecast::forecast_simulation(f, rc.horizon.value_or(f.n_samples), rc.n_paths, rc.seed);
    cfg.threads = rc.threads;
    return sim::simulate_ensemble(f.harmonics, f.phase2, cfg);
}

void cmd_simulate(const EnsembleArgs& a, const RunConfig& rc) {
    const auto f = load_fit(a.fit);
    const auto ens = run_ensemble(f, rc);
    const fs::path dir = rc.output_dir;
    fs::create_directories(dir);
    forecast::write_summary_csv(sim::summarize(ens), f.end_date(), dir / "ensemble_summary.csv");
    forecast::write_envelope_csv(sim::envelope(ens), f.end_date(), dir / "envelope.csv");
    if (a.write_paths) forecast::write_paths_csv(ens, f.end_date(), dir / "paths.csv");
    json cfg = config_json(rc);
    cfg["fit"] = a.fit;
    write_json(dir / "simulate.json", {{"config", cfg},
                                       {"origin", format_date(f.end_date())},
                                       {"h0", f.last_value},
                                       {"n_paths", ens.n_paths()},
                                       {"n_steps", ens.config().n_steps},
                                       {"alpha", f.phase2.alpha},
                                       {"sigma", f.phase2.sigma},
                                       {"gamma", f.phase2.gamma}});
}

// The holdout window is the horizon days after the fit window.
TimeSeries holdout_window(const fs::path& path, const harmonic::ModelFit& f, std::size_t horizon) {
    const auto series = read_input(path);
    const Date first = f.end_date() + std::chrono::days{1};
    if (series.start_date() > first || series.end_date() < first) {
        throw RangeError("holdout " + path.string() + " does not cover " + format_date(first));
    }
    const auto offset = static_cast<std::size_t>((first - series.start_date()).count());
    const std::size_t available = series.size() - offset;
    if (available < horizon) {
        throw SizeError("holdout has " + std::to_string(available) + " observations after " + format_date(f.end_date()) +
                        " but the horizon is " + std::to_string(horizon));
    }
    return slice_period(series, first, first + std::chrono::days{static_cast<long>(horizon) - 1});
}

void cmd_forecast(const EnsembleArgs& a, const RunConfig& rc) {
    const auto f = load_fit(a.fit);
    const std::size_t horizon = rc.horizon.value_or(f.n_samples);
    const auto mults = forecast::parse_multipliers(rc.multipliers);
    std::optional<TimeSeries> hold;
    if (!a.holdout.empty()) hold = holdout_window(a.holdout, f, horizon);
    const auto ens = run_ensemble(f, rc);
    const auto report = forecast::forecast_report(f, ens, mults, hold);

    const fs::path dir = rc.output_dir;
    forecast::write_report(report, dir);
    if (a.write_paths) forecast::write_paths_csv(ens, f.end_date(), dir / "paths.csv");
    json cfg = config_json(rc);
    cfg["fit"] = a.fit;
    cfg["holdout"] = a.holdout;
    write_json(dir / "forecast.json", {{"config", cfg},
                                       {"origin", format_date(report.origin)},
                                       {"horizon", horizon},
                                       {"sigma_H", report.bands.sigma_H},
                                       {"coverage", forecast::to_json(report.coverage)}});
    auto pct = [](double fraction) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * fraction);
        return std::string(buf) == "-0.00%" ? std::string("0.00%") : std::string(buf);
    };
    char buf[160];
    std::snprintf(buf, sizeof buf, "%10s %10s", "multiplier", "forecast");
    std::cout << buf << (hold ? "    holdout  difference" : "") << "\n";
    for (const auto& r : report.coverage.rows) {
        std::snprintf(buf, sizeof buf, "%10g %10s", r.multiplier, pct(r.forecast).c_str());
        std::cout << buf;
        if (hold) {
            std::snprintf(buf, sizeof buf, " %10s %11s", pct(*r.holdout).c_str(), pct(*r.difference).c_str());
            std::cout << buf;
        }
        std::cout << "\n";
    }
}

// ---- fixture ----

struct FixtureArgs {
    std::string output = "fixture.csv";
    std::string spec;
    std::size_t periods = 1;
    std::optional<double> alpha, sigma;
};

void cmd_fixture(const FixtureArgs& a, const RunConfig& rc) {
    auto spec = a.spec.empty() ? fixture::reference_scale(rc.seed) : fixture::fixture_spec_from_json(read_json(a.spec));
    spec.seed = rc.seed;
    spec.params.gamma = rc.gamma;
    if (a.alpha) spec.params.alpha = *a.alpha;
    if (a.sigma) spec.params.sigma = *a.sigma;
    if (a.periods == 0) throw ConfigError("--periods-count must be at least 1");
    spec.n_steps = spec.harmonics.n_samples * a.periods;
    const auto f = fixture::generate(spec);
    if (fs::path(a.output).has_parent_path()) fs::create_directories(fs::path(a.output).parent_path());
    fixture::write_fixture(f, a.output);
    std::cerr << "wrote " << f.series.size() << " observations to " << a.output << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic mean-reversion model for daily inflow series"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Flat key = value file with defaults for the shared options");

    RunConfig rc;
    std::optional<double> rms_tol;
    std::optional<std::size_t> fixed_count, horizon;
    app.add_option("--lambda", rc.lambda, "HP smoothing parameter")->capture_default_str();
    app.add_option("--gamma", rc.gamma, "Variance elasticity")->capture_default_str();
    auto* tol_opt = app.add_option("--rms-tol", rms_tol, "Stop adding harmonics below this mean-square change");
    app.add_option("--fixed-count", fixed_count, "Keep exactly this many non-constant harmonics")->excludes(tol_opt);
    app.add_option("--paths", rc.n_paths, "Simulated paths (even)")->capture_default_str();
    app.add_option("--seed", rc.seed, "Random seed")->capture_default_str();
    app.add_option("--multipliers", rc.multipliers, "Band multipliers, START:STOP:STEP or a list")->capture_default_str();
    app.add_option("--periods", rc.periods, "Comma-separated START:END date ranges");
    app.add_option("--horizon", horizon, "Forecast steps (default: one fitted period)");
    app.add_option("--threads", rc.threads, "Worker threads, 0 for all cores")->capture_default_str();
    app.add_option("--output-dir", rc.output_dir, "Directory for output files")->capture_default_str();

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Aggregate river CSVs into a daily system series");
    c_ingest->add_option("inputs", ingest.inputs, "River discharge CSV files")->required();
    c_ingest->add_option("-o,--output", ingest.output, "Output series CSV")->capture_default_str();
    c_ingest->add_option("--date-column", ingest.schema.date)->capture_default_str();
    c_ingest->add_option("--region-column", ingest.schema.region)->capture_default_str();
    c_ingest->add_option("--reservoir-column", ingest.schema.reservoir)->capture_default_str();
    c_ingest->add_option("--river-column", ingest.schema.river)->capture_default_str();
    c_ingest->add_option("--discharge-column", ingest.schema.discharge)->capture_default_str();
    c_ingest->add_flag("--no-log", ingest.no_log, "Keep discharge levels instead of logs");
    c_ingest->add_flag("--interpolate-gaps", ingest.interpolate, "Linearly fill short gaps");
    c_ingest->add_option("--max-gap", ingest.max_gap, "Longest gap to interpolate (days)")->capture_default_str();

    TestArgs test;
    auto* c_test = app.add_subcommand("test", "Periodicity, normality, unit-root and variance-ratio diagnostics");
    c_test->add_option("input", test.input, "Series CSV")->required();
    c_test->add_option("--adf-max-lag", test.adf_max_lag);
    c_test->add_option("--vr-horizons", test.vr_horizons)->capture_default_str();

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "Estimate reversion, volatility and the periodic level");
    c_fit->add_option("input", fit.input, "Series CSV")->required();
    c_fit->add_option("--period", fit.period, "START:END window to fit");
    c_fit->add_flag("--dump-rms", fit.dump_rms, "Write rms_trace.csv");

    EnsembleArgs simulate;
    auto* c_sim = app.add_subcommand("simulate", "Simulate the fitted model over the next period");
    c_sim->add_option("fit", simulate.fit, "fit.json")->required();
    c_sim->add_flag("--write-paths", simulate.write_paths, "Write every path to paths.csv");

    EnsembleArgs fc;
    auto* c_fc = app.add_subcommand("forecast", "Bands, envelope and coverage for the next period");
    c_fc->add_option("fit", fc.fit, "fit.json")->required();
    c_fc->add_option("--holdout", fc.holdout, "Series CSV with the observed continuation");
    c_fc->add_flag("--write-paths", fc.write_paths, "Write every path to paths.csv");

    FixtureArgs fx;
    auto* c_fx = app.add_subcommand("fixture", "Generate a synthetic series with known parameters");
    c_fx->add_option("-o,--output", fx.output, "Output series CSV (truth goes to <stem>.truth.json)")
        ->capture_default_str();
    c_fx->add_option("--spec", fx.spec, "Fixture JSON (default: reference-scale parameters)");
    c_fx->add_option("--periods-count", fx.periods, "Number of base periods to generate")->capture_default_str();
    c_fx->add_option("--alpha", fx.alpha);
    c_fx->add_option("--sigma", fx.sigma);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    rc.rms_tol = rms_tol;
    rc.fixed_count = fixed_count;
    rc.horizon = horizon;

    try {
        if (rc.horizon && *rc.horizon == 0) throw ConfigError("--horizon must be at least 1");
        if (*c_ingest) cmd_ingest(ingest, rc);
        if (*c_test) cmd_test(test, rc);
        if (*c_fit) cmd_fit(fit, rc);
        if (*c_sim) cmd_simulate(simulate, rc);
        if (*c_fc) cmd_forecast(fc, rc);
        if (*c_fx) cmd_fixture(fx, rc);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
