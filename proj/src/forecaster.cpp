#include "hydro/forecaster.hpp"

#include "hydro/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace hydro::forecast {

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Percent with two decimals; never prints "-0.00".
std::string pct(double fraction) {
    auto s = fmt("%.2f", 100.0 * fraction);
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string value(double v) { return fmt("%.10f", v); }

// 0.5 -> "0.5", 2 -> "2.0", 0.25 -> "0.25"
std::string label(double multiplier) {
    auto s = fmt("%.10g", multiplier);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

double parse_number(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError("invalid multiplier '" + std::string(s) + "'");
    }
    return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

}  // namespace

std::vector<double> default_multipliers() {
    std::vector<double> m;
    for (int i = 5; i <= 26; ++i) m.push_back(i / 10.0);
    return m;
}

std::vector<double> parse_multipliers(std::string_view spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string_view::npos) {
        const auto a = spec.find(':');
        const auto b = spec.find(':', a + 1);
        if (b == std::string_view::npos) throw ConfigError("multiplier grid must be start:stop:step");
        const double start = parse_number(spec.substr(0, a));
        const double stop = parse_number(spec.substr(a + 1, b - a - 1));
        const double step = parse_number(spec.substr(b + 1));
        if (!(step > 0.0) || stop < start) throw ConfigError("invalid multiplier grid");
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= count; ++i) out.push_back(std::round((start + i * step) * 1e9) / 1e9);
    } else {
        std::size_t pos = 0;
        while (pos <= spec.size()) {
            auto comma = spec.find(',', pos);
            if (comma == std::string_view::npos) comma = spec.size();
            out.push_back(parse_number(spec.substr(pos, comma - pos)));
            pos = comma + 1;
        }
    }
    for (double m : out) {
        if (!(m >= 0.0) || !std::isfinite(m)) throw ConfigError("multipliers must be non-negative");
    }
    return out;
}

BandSet build_bands(std::vector<double> center, double sigma_H, std::span<const double> multipliers) {
    if (multipliers.empty()) throw ConfigError("no band multipliers given");
    if (center.empty()) throw ConfigError("band horizon must be at least 1 step");
    if (!(sigma_H >= 0.0)) throw DomainError("sigma_H must be non-negative");
    BandSet b;
    b.multipliers.assign(multipliers.begin(), multipliers.end());
    b.center = std::move(center);
    b.sigma_H = sigma_H;
    for (double m : b.multipliers) {
        if (!(m >= 0.0)) throw ConfigError("band multipliers must be non-negative");
        const double half = m * sigma_H;
        std::vector<double> lo(b.center.size()), hi(b.center.size());
        for (std::size_t i = 0; i < b.center.size(); ++i) {
            lo[i] = b.center[i] - half;
            hi[i] = b.center[i] + half;
        }
        b.lower.push_back(std::move(lo));
        b.upper.push_back(std::move(hi));
    }
    return b;
}

BandSet build_bands(const harmonic::ModelFit& fit, std::size_t horizon_steps, std::span<const double> multipliers) {
    if (horizon_steps == 0) throw ConfigError("band horizon must be at least 1 step");
    return build_bands(fit.harmonics.evaluate_range(fit.n_samples, horizon_steps), fit.sigma_H, multipliers);
}

sim::SimulationConfig forecast_simulation(const harmonic::ModelFit& fit, std::size_t horizon_steps,
                                         std::size_t n_paths, std::uint64_t seed) {
    if (fit.n_samples == 0) throw ConfigError("model fit has no samples");
    sim::SimulationConfig cfg;
    cfg.n_paths = n_paths;
    cfg.n_steps = horizon_steps;
    cfg.dt_years = fit.dt_years;
    cfg.h0 = fit.last_value;
    cfg.seed = seed;
    cfg.mu_offset = fit.n_samples - 1;
    return cfg;
}

std::vector<double> ensemble_coverage(const sim::SimulationEnsemble& ensemble, const BandSet& bands) {
    const std::size_t h = bands.horizon();
    if (ensemble.config().n_steps != h) {
        throw SizeError("ensemble horizon " + std::to_string(ensemble.config().n_steps) +
                        " differs from band horizon " + std::to_string(h));
    }
    std::vector<double> out(bands.multipliers.size(), 0.0);
    for (std::size_t b = 0; b < bands.multipliers.size(); ++b) {
        const auto& lo = bands.lower[b];
        const auto& hi = bands.upper[b];
        double sum = 0.0;
        for (std::size_t p = 0; p < ensemble.n_paths(); ++p) {
            const auto path = ensemble.path(p);
            std::size_t inside = 0;
            for (std::size_t i = 0; i < h; ++i) {
                const double v = path[i + 1];
                inside += (v >= lo[i] && v <= hi[i]) ? 1 : 0;
            }
            sum += static_cast<double>(inside) / static_cast<double>(h);
        }
        out[b] = sum / static_cast<double>(ensemble.n_paths());
    }
    return out;
}

std::vector<double> holdout_coverage(std::span<const double> series, const BandSet& bands) {
    const std::size_t h = bands.horizon();
    if (series.size() != h) {
        throw SizeError("holdout length " + std::to_string(series.size()) + " differs from band horizon " +
                        std::to_string(h));
    }
    std::vector<double> out(bands.multipliers.size(), 0.0);
    for (std::size_t b = 0; b < bands.multipliers.size(); ++b) {
        std::size_t inside = 0;
        for (std::size_t i = 0; i < h; ++i) {
            inside += (series[i] >= bands.lower[b][i] && series[i] <= bands.upper[b][i]) ? 1 : 0;
        }
        out[b] = static_cast<double>(inside) / static_cast<double>(h);
    }
    return out;
}

CoverageTable coverage_table(const BandSet& bands, std::span<const double> forecast,
                             std::optional<std::vector<double>> holdout) {
    if (forecast.size() != bands.multipliers.size() || (holdout && holdout->size() != forecast.size())) {
        throw SizeError("coverage columns do not match the multiplier grid");
    }
    CoverageTable t;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        CoverageRow r{bands.multipliers[i], forecast[i], std::nullopt, std::nullopt};
        if (holdout) {
            r.holdout = (*holdout)[i];
            r.difference = (*holdout)[i] - forecast[i];
        }
        t.rows.push_back(r);
    }
    return t;
}

ForecastReport forecast_report(const harmonic::ModelFit& fit, const sim::SimulationEnsemble& ensemble,
                               std::span<const double> multipliers, const std::optional<TimeSeries>& holdout) {
    const std::size_t h = ensemble.config().n_steps;
    ForecastReport r;
    r.origin = fit.end_date();
    r.envelope = sim::envelope(ensemble);
    r.summary = sim::summarize(ensemble);
    r.bands = build_bands(fit, h, multipliers);
    const auto fc = ensemble_coverage(ensemble, r.bands);
    std::optional<std::vector<double>> hc;
    if (holdout) {
        hc = holdout_coverage(holdout->values(), r.bands);
        r.holdout = holdout->values();
    }
    r.coverage = coverage_table(r.bands, fc, hc);
    return r;
}

void write_coverage_csv(const CoverageTable& table, const std::filesystem::path& path) {
    auto out = open_out(path);
    const bool with_holdout = !table.rows.empty() && table.rows.front().holdout.has_value();
    out << "multiplier,forecast_pct" << (with_holdout ? ",holdout_pct,difference_pct" : "") << '\n';
    for (const auto& r : table.rows) {
        out << label(r.multiplier) << ',' << pct(r.forecast);
        if (with_holdout) out << ',' << pct(*r.holdout) << ',' << pct(*r.difference);
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

nlohmann::json to_json(const CoverageTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows) {
        nlohmann::json row{{"multiplier", r.multiplier}, {"forecast", r.forecast}};
        if (r.holdout) {
            row["holdout"] = *r.holdout;
            row["difference"] = *r.difference;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_summary_csv(const sim::StepSummary& s, Date origin, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "step,date,mean,min,max,q05,q95\n";
    for (std::size_t i = 0; i < s.mean.size(); ++i) {
        out << i << ',' << format_date(origin + std::chrono::days{static_cast<long>(i)}) << ',' << value(s.mean[i])
            << ',' << value(s.min[i]) << ',' << value(s.max[i]) << ',' << value(s.q05[i]) << ',' << value(s.q95[i])
            << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

void write_envelope_csv(const sim::Envelope& env, Date origin, const std::filesystem::path& path,
                        const std::optional<std::vector<double>>& holdout) {
    auto out = open_out(path);
    out << "step,date,lower,upper" << (holdout ? ",holdout" : "") << '\n';
    for (std::size_t i = 0; i < env.lower.size(); ++i) {
        out << i << ',' << format_date(origin + std::chrono::days{static_cast<long>(i)}) << ',' << value(env.lower[i])
            << ',' << value(env.upper[i]);
        if (holdout) out << ',' << (i == 0 ? std::string() : value((*holdout)[i - 1]));
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

void write_paths_csv(const sim::SimulationEnsemble& e, Date origin, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "step,date";
    for (std::size_t p = 0; p < e.n_paths(); ++p) out << ",p" << p;
    out << '\n';
    for (std::size_t i = 0; i < e.n_columns(); ++i) {
        out << i << ',' << format_date(origin + std::chrono::days{static_cast<long>(i)});
        for (std::size_t p = 0; p < e.n_paths(); ++p) out << ',' << value(e.at(p, i));
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

void write_report(const ForecastReport& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_summary_csv(r.summary, r.origin, dir / "ensemble_summary.csv");
    write_envelope_csv(r.envelope, r.origin, dir / "envelope.csv", r.holdout);
    {
        auto out = open_out(dir / "bands.csv");
        out << "step,date,center";
        for (double m : r.bands.multipliers) out << ",lower_" << label(m) << ",upper_" << label(m);
        out << '\n';
        for (std::size_t i = 0; i < r.bands.horizon(); ++i) {
            out << i + 1 << ',' << format_date(r.origin + std::chrono::days{static_cast<long>(i + 1)}) << ','
                << value(r.bands.center[i]);
            for (std::size_t b = 0; b < r.bands.multipliers.size(); ++b) {
                out << ',' << value(r.bands.lower[b][i]) << ',' << value(r.bands.upper[b][i]);
            }
            out << '\n';
        }
        if (!out) throw IoError("failed writing bands.csv");
    }
    write_coverage_csv(r.coverage, dir / "coverage.csv");
}

}  // namespace hydro::forecast
