#include "hydro/fixture.hpp"

#include "hydro/errors.hpp"
#include "hydro/forecaster.hpp"
#include "hydro/simulator.hpp"

#include <fstream>

namespace hydro::fixture {

FixtureSpec reference_scale(std::uint64_t seed) {
    FixtureSpec s;
    s.params = {112.0, 3.0, 0.0};
    s.harmonics.n_samples = 1095;
    s.harmonics.base_period_years = 3.0;
    s.harmonics.terms = {{0, 7.39, 0.0}, {3, 0.29, -2.77}, {6, 0.22, 2.82}};
    s.n_steps = 1095;
    s.seed = seed;
    return s;
}

std::pair<TimeSeries, TimeSeries> generate_antithetic_pair(const FixtureSpec& spec) {
    if (spec.n_steps < 2) throw ConfigError("fixture needs at least 2 observations");
    sim::SimulationConfig cfg;
    cfg.n_paths = 2;
    cfg.n_steps = spec.n_steps - 1;
    cfg.dt_years = spec.dt_years;
    cfg.h0 = spec.h0 ? *spec.h0 : spec.harmonics.evaluate(0);
    cfg.seed = spec.seed;
    cfg.threads = 1;
    const auto ens = sim::simulate_ensemble(spec.harmonics, spec.params, cfg);
    auto make = [&](std::size_t p) {
        const auto row = ens.path(p);
        return TimeSeries(spec.start_date, std::vector<double>(row.begin(), row.end()), spec.dt_years, "fixture");
    };
    return {make(0), make(1)};
}

Fixture generate(const FixtureSpec& spec) { return {generate_antithetic_pair(spec).first, spec}; }

TimeSeries continuation(const harmonic::ModelFit& fit, std::size_t horizon_steps, std::uint64_t seed) {
    auto cfg = forecast::forecast_simulation(fit, horizon_steps, 2, seed);
    cfg.threads = 1;
    const auto ens = sim::simulate_ensemble(fit.harmonics, fit.phase2, cfg);
    const auto row = ens.path(0);
    return TimeSeries(fit.end_date() + std::chrono::days{1}, std::vector<double>(row.begin() + 1, row.end()),
                      fit.dt_years, "continuation");
}

nlohmann::json to_json(const FixtureSpec& s) {
    auto j = harmonic::to_json(s.harmonics);
    j["alpha"] = s.params.alpha;
    j["sigma"] = s.params.sigma;
    j["gamma"] = s.params.gamma;
    j["n_steps"] = s.n_steps;
    j["dt_years"] = s.dt_years;
    j["seed"] = s.seed;
    j["h0"] = s.h0 ? nlohmann::json(*s.h0) : nlohmann::json(nullptr);
    j["start_date"] = format_date(s.start_date);
    return j;
}

FixtureSpec fixture_spec_from_json(const nlohmann::json& j) {
    try {
        FixtureSpec s;
        s.harmonics = harmonic::harmonic_model_from_json(j);
        s.params = {j.at("alpha").get<double>(), j.at("sigma").get<double>(), j.value("gamma", 0.0)};
        s.n_steps = j.at("n_steps").get<std::size_t>();
        s.dt_years = j.value("dt_years", kDailyStep);
        s.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("h0") && !j["h0"].is_null()) s.h0 = j["h0"].get<double>();
        if (j.contains("start_date")) s.start_date = parse_date(j["start_date"].get<std::string>());
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed fixture document: ") + e.what());
    }
}

void write_fixture(const Fixture& fixture, const std::filesystem::path& csv_path) {
    write_series_csv(csv_path, fixture.series);
    auto sidecar = csv_path;
    sidecar.replace_extension(".truth.json");
    std::ofstream out(sidecar, std::ios::binary);
    if (!out) throw IoError("cannot write " + sidecar.string());
    out << to_json(fixture.truth).dump(2) << '\n';
}

}  // namespace hydro::fixture
