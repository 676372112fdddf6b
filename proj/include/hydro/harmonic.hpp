#pragma once

#include "hydro/series.hpp"
#include "hydro/trend.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hydro::harmonic {

// dH = alpha (mu(t) - H) dt + sigma H^gamma dB
struct SDEParams {
    double alpha = 1.0;
    double sigma = 0.0;
    double gamma = 0.0;
};

struct HarmonicTerm {
    std::size_t k = 0;
    double amplitude = 0.0;
    double phase = 0.0;  // radians, (-pi, pi]
};

// Truncated single-sided cosine series over one base period of n_samples points.
// Sample indices outside [0, n_samples) wrap periodically.
struct HarmonicModel {
    double base_period_years = 0.0;
    std::size_t n_samples = 0;
    std::vector<HarmonicTerm> terms;

    [[nodiscard]] double evaluate(std::size_t n) const;
    [[nodiscard]] std::vector<double> evaluate_range(std::size_t first, std::size_t count) const;
};

[[nodiscard]] inline double evaluate_mu(const HarmonicModel& model, std::size_t n) {
    return model.evaluate(n);
}

struct Phase1Result {
    SDEParams params;
    std::vector<double> mu_hat;  // m + m_dot / alpha
};

struct RmsPoint {
    std::size_t harmonics = 0;  // non-constant terms in the reconstruction
    double rms = 0.0;
};

// Stop when adding a term changes the reconstruction by less than rms_tol
// (mean squared change), or after exactly fixed_count non-constant terms.
struct TruncationCriterion {
    std::optional<double> rms_tol;
    std::optional<std::size_t> fixed_count;

    static TruncationCriterion tolerance(double tol) { return {tol, std::nullopt}; }
    static TruncationCriterion count(std::size_t n) { return {std::nullopt, n}; }
};

inline constexpr double kDefaultRmsTolerance = 1e-5;

struct Truncation {
    HarmonicModel model;
    std::vector<RmsPoint> rms_trace;
};

struct FitConfig {
    double lambda = trend::kDefaultLambda;
    double gamma = 0.0;
    TruncationCriterion truncation = TruncationCriterion::tolerance(kDefaultRmsTolerance);
};

struct ModelFit {
    SDEParams phase1;
    SDEParams phase2;
    std::vector<double> mu_hat;
    HarmonicModel harmonics;
    std::vector<RmsPoint> rms_trace;
    double sigma_H = 0.0;

    trend::TrendEstimate trend;
    Date start_date{};
    double dt_years = kDailyStep;
    std::size_t n_samples = 0;
    double last_value = 0.0;
    std::string label;
    FitConfig config;

    [[nodiscard]] Date end_date() const {
        return start_date + std::chrono::days{static_cast<long>(n_samples) - 1};
    }
};

[[nodiscard]] Phase1Result estimate_phase1(const TimeSeries& series, const trend::TrendEstimate& trend,
                                           double gamma = 0.0);

// Every single-sided DFT term k = 0..floor(N/2): a_0 = M_0 / N, a_k = 2|M_k| / N,
// Nyquist |M_{N/2}| / N; phases are arg(M_k).
[[nodiscard]] HarmonicModel extract_harmonics(std::span<const double> signal, double dt_years = kDailyStep);

[[nodiscard]] Truncation truncate_harmonics(const HarmonicModel& spectrum, const TruncationCriterion& criterion);

[[nodiscard]] SDEParams estimate_phase2(const TimeSeries& series, const HarmonicModel& model,
                                        double gamma = 0.0);

[[nodiscard]] ModelFit fit(const TimeSeries& series, const FitConfig& config = {});

[[nodiscard]] nlohmann::json to_json(const HarmonicModel& model);
[[nodiscard]] HarmonicModel harmonic_model_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const ModelFit& fit);
// Restores what forecasting needs: parameters, harmonics, sigma_H and period metadata.
[[nodiscard]] ModelFit model_fit_from_json(const nlohmann::json& j);

}  // namespace hydro::harmonic
