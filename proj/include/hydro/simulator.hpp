#pragma once

#include "hydro/harmonic.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hydro::sim {

using harmonic::HarmonicModel;
using harmonic::SDEParams;

struct SimulationConfig {
    std::size_t n_paths = 10000;  // even: pairs (eps, -eps)
    std::size_t n_steps = 1;
    double dt_years = kDailyStep;
    double h0 = 1.0;
    std::uint64_t seed = 0;
    // Model index of column 0; step i uses mu(mu_offset + i).
    std::size_t mu_offset = 0;
    unsigned threads = 0;  // 0: hardware concurrency. Output does not depend on it.
};

void validate(const SimulationConfig& config);

// Row-major n_paths x (n_steps + 1). Paths 2j and 2j+1 are antithetic twins.
class SimulationEnsemble {
public:
    SimulationEnsemble(SimulationConfig config, std::vector<double> data);

    [[nodiscard]] const SimulationConfig& config() const noexcept { return config_; }
    [[nodiscard]] std::size_t n_paths() const noexcept { return config_.n_paths; }
    [[nodiscard]] std::size_t n_columns() const noexcept { return config_.n_steps + 1; }
    [[nodiscard]] std::span<const double> path(std::size_t p) const noexcept {
        return {data_.data() + p * n_columns(), n_columns()};
    }
    [[nodiscard]] double at(std::size_t p, std::size_t i) const noexcept { return data_[p * n_columns() + i]; }
    [[nodiscard]] static constexpr std::size_t pair_index(std::size_t p) noexcept { return p ^ 1u; }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

private:
    SimulationConfig config_;
    std::vector<double> data_;
};

// h + alpha (mu - h) dt + sigma h^gamma sqrt(dt) eps
[[nodiscard]] double euler_step(double h, double mu_t, const SDEParams& params, double dt, double eps);

[[nodiscard]] SimulationEnsemble simulate_ensemble(const HarmonicModel& model, const SDEParams& params,
                                                   const SimulationConfig& config);

struct Envelope {
    std::vector<double> lower;
    std::vector<double> upper;
};

[[nodiscard]] Envelope envelope(const SimulationEnsemble& ensemble);

struct StepSummary {
    std::vector<double> mean, min, max, q05, q95;
};

// Quantiles use linear interpolation between order statistics.
[[nodiscard]] StepSummary summarize(const SimulationEnsemble& ensemble);

}  // namespace hydro::sim
