#pragma once

#include "hydro/harmonic.hpp"
#include "hydro/simulator.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace hydro::forecast {

// 0.5, 0.6, ..., 2.6
[[nodiscard]] std::vector<double> default_multipliers();
// "start:stop:step" or a comma-separated list.
[[nodiscard]] std::vector<double> parse_multipliers(std::string_view spec);

// center +/- i * sigma_H for every multiplier i.
struct BandSet {
    std::vector<double> multipliers;
    std::vector<double> center;
    double sigma_H = 0.0;
    std::vector<std::vector<double>> lower;  // [multiplier][step]
    std::vector<std::vector<double>> upper;

    [[nodiscard]] std::size_t horizon() const noexcept { return center.size(); }
};

[[nodiscard]] BandSet build_bands(std::vector<double> center, double sigma_H, std::span<const double> multipliers);
// Center is the fitted periodic level over the period that follows the fit window.
[[nodiscard]] BandSet build_bands(const harmonic::ModelFit& fit, std::size_t horizon_steps,
                                  std::span<const double> multipliers);

// Paths start at the last fitted observation (model index N - 1); column i uses mu(N - 1 + i).
[[nodiscard]] sim::SimulationConfig forecast_simulation(const harmonic::ModelFit& fit, std::size_t horizon_steps,
                                                        std::size_t n_paths, std::uint64_t seed);

// Mean over paths of the fraction of forecast points (columns 1..n_steps) inside each band.
[[nodiscard]] std::vector<double> ensemble_coverage(const sim::SimulationEnsemble& ensemble, const BandSet& bands);
[[nodiscard]] std::vector<double> holdout_coverage(std::span<const double> series, const BandSet& bands);

struct CoverageRow {
    double multiplier = 0.0;
    double forecast = 0.0;
    std::optional<double> holdout;
    std::optional<double> difference;  // holdout - forecast
};

struct CoverageTable {
    std::vector<CoverageRow> rows;
};

[[nodiscard]] CoverageTable coverage_table(const BandSet& bands, std::span<const double> forecast,
                                           std::optional<std::vector<double>> holdout = std::nullopt);

struct ForecastReport {
    Date origin{};  // date of ensemble column 0
    sim::Envelope envelope;
    sim::StepSummary summary;
    BandSet bands;
    CoverageTable coverage;
    std::optional<std::vector<double>> holdout;
};

[[nodiscard]] ForecastReport forecast_report(const harmonic::ModelFit& fit, const sim::SimulationEnsemble& ensemble,
                                             std::span<const double> multipliers,
                                             const std::optional<TimeSeries>& holdout = std::nullopt);

// Column 0 of every file is the origin date.
void write_summary_csv(const sim::StepSummary& summary, Date origin, const std::filesystem::path& path);
void write_envelope_csv(const sim::Envelope& envelope, Date origin, const std::filesystem::path& path,
                        const std::optional<std::vector<double>>& holdout = std::nullopt);
// Wide layout: step, date, p0, p1, ...
void write_paths_csv(const sim::SimulationEnsemble& ensemble, Date origin, const std::filesystem::path& path);

// Writes ensemble_summary.csv, envelope.csv, bands.csv and coverage.csv into dir.
void write_report(const ForecastReport& report, const std::filesystem::path& dir);
void write_coverage_csv(const CoverageTable& table, const std::filesystem::path& path);
[[nodiscard]] nlohmann::json to_json(const CoverageTable& table);

}  // namespace hydro::forecast
