#include "hydro/simulator.hpp"

#include "hydro/errors.hpp"
#include "hydro/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace hydro::sim {

void validate(const SimulationConfig& c) {
    if (c.n_paths == 0 || c.n_paths % 2 != 0) throw ConfigError("n_paths must be a positive even number");
    if (c.n_steps == 0) throw ConfigError("n_steps must be at least 1");
    if (!(c.dt_years > 0.0) || !std::isfinite(c.dt_years)) throw ConfigError("dt_years must be positive");
    if (!(c.h0 > 0.0) || !std::isfinite(c.h0)) throw ConfigError("h0 must be a positive real");
}

SimulationEnsemble::SimulationEnsemble(SimulationConfig config, std::vector<double> data)
    : config_(config), data_(std::move(data)) {
    if (data_.size() != config_.n_paths * n_columns()) throw SizeError("ensemble data has the wrong size");
}

double euler_step(double h, double mu_t, const SDEParams& params, double dt, double eps) {
    const double vol = params.gamma == 0.0 ? params.sigma : params.sigma * std::pow(h, params.gamma);
    const double next = h + params.alpha * (mu_t - h) * dt + vol * std::sqrt(dt) * eps;
    if (!std::isfinite(next)) throw NumericError("non-finite Euler step");
    return next;
}

SimulationEnsemble simulate_ensemble(const HarmonicModel& model, const SDEParams& params,
                                     const SimulationConfig& config) {
    validate(config);
    if (!(params.alpha > 0.0) || params.sigma < 0.0 || params.gamma < 0.0) {
        throw ConfigError("SDE parameters need alpha > 0, sigma >= 0, gamma >= 0");
    }
    const std::size_t cols = config.n_steps + 1;
    const std::size_t pairs = config.n_paths / 2;
    const auto mu = model.evaluate_range(config.mu_offset, config.n_steps);
    const double dt = config.dt_years;
    std::vector<double> data(config.n_paths * cols);

    auto run_pairs = [&](std::size_t begin, std::size_t end) {
        std::vector<double> eps(config.n_steps);
        for (std::size_t j = begin; j < end; ++j) {
            NormalStream(config.seed, j).fill(eps);
            double* up = data.data() + (2 * j) * cols;
            double* dn = up + cols;
            up[0] = dn[0] = config.h0;
            for (std::size_t i = 0; i < config.n_steps; ++i) {
                up[i + 1] = euler_step(up[i], mu[i], params, dt, eps[i]);
                dn[i + 1] = euler_step(dn[i], mu[i], params, dt, -eps[i]);
            }
        }
    };

    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, pairs));
    if (threads <= 1) {
        run_pairs(0, pairs);
    } else {
        const std::size_t chunk = (pairs + threads - 1) / threads;
        std::vector<std::exception_ptr> errors(threads);
        {
            std::vector<std::jthread> workers;
            for (std::size_t w = 0, b = 0; b < pairs; ++w, b += chunk) {
                workers.emplace_back([&, w, b] {
                    try {
                        run_pairs(b, std::min(pairs, b + chunk));
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
        }
        for (const auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }
    return SimulationEnsemble(config, std::move(data));
}

Envelope envelope(const SimulationEnsemble& e) {
    const std::size_t cols = e.n_columns();
    Envelope env{std::vector<double>(e.path(0).begin(), e.path(0).end()),
                 std::vector<double>(e.path(0).begin(), e.path(0).end())};
    for (std::size_t p = 1; p < e.n_paths(); ++p) {
        const auto row = e.path(p);
        for (std::size_t i = 0; i < cols; ++i) {
            env.lower[i] = std::min(env.lower[i], row[i]);
            env.upper[i] = std::max(env.upper[i], row[i]);
        }
    }
    return env;
}

namespace {

double quantile_sorted(const std::vector<double>& v, double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

StepSummary summarize(const SimulationEnsemble& e) {
    const std::size_t cols = e.n_columns();
    StepSummary s;
    s.mean.resize(cols);
    s.min.resize(cols);
    s.max.resize(cols);
    s.q05.resize(cols);
    s.q95.resize(cols);
    std::vector<double> column(e.n_paths());
    for (std::size_t i = 0; i < cols; ++i) {
        double sum = 0.0;
        for (std::size_t p = 0; p < e.n_paths(); ++p) {
            column[p] = e.at(p, i);
            sum += column[p];
        }
        std::sort(column.begin(), column.end());
        s.mean[i] = sum / static_cast<double>(e.n_paths());
        s.min[i] = column.front();
        s.max[i] = column.back();
        s.q05[i] = quantile_sorted(column, 0.05);
        s.q95[i] = quantile_sorted(column, 0.95);
    }
    return s;
}

}  // namespace hydro::sim
