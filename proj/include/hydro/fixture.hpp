#pragma once

#include "hydro/harmonic.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>

namespace hydro::fixture {

// Ground truth for a synthetic series. n_steps counts observations (h0 included).
struct FixtureSpec {
    harmonic::SDEParams params;
    harmonic::HarmonicModel harmonics;
    std::size_t n_steps = 1095;
    double dt_years = kDailyStep;
    std::uint64_t seed = 0;
    std::optional<double> h0;  // defaults to mu(0)
    Date start_date = Date{std::chrono::year{2007} / 2 / 5};
};

// alpha = 112, sigma = 3, gamma = 0, mu = 7.39 + 0.29 cos(2 pi 3n/N - 2.77) + 0.22 cos(2 pi 6n/N + 2.82),
// N = 1095 daily samples (three years).
[[nodiscard]] FixtureSpec reference_scale(std::uint64_t seed);

struct Fixture {
    TimeSeries series;
    FixtureSpec truth;
};

[[nodiscard]] Fixture generate(const FixtureSpec& spec);
// The generated path and its antithetic twin (same draws, negated).
[[nodiscard]] std::pair<TimeSeries, TimeSeries> generate_antithetic_pair(const FixtureSpec& spec);

// One path of the fitted model over the horizon_steps days after the fit window, started from the
// last fitted observation with the same alignment the forecaster uses.
[[nodiscard]] TimeSeries continuation(const harmonic::ModelFit& fit, std::size_t horizon_steps, std::uint64_t seed);

[[nodiscard]] nlohmann::json to_json(const FixtureSpec& spec);
[[nodiscard]] FixtureSpec fixture_spec_from_json(const nlohmann::json& j);
// <stem>.csv (date,value) and <stem>.truth.json
void write_fixture(const Fixture& fixture, const std::filesystem::path& csv_path);

}  // namespace hydro::fixture
