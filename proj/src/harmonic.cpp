#include "hydro/harmonic.hpp"

#include "hydro/dft.hpp"
#include "hydro/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace hydro::harmonic {

namespace {

double term_value(const HarmonicTerm& t, std::size_t n, std::size_t n_samples) {
    // (k n) mod N keeps the angle exact for large n and makes evaluation periodic.
    const std::size_t j = (t.k % n_samples) * (n % n_samples) % n_samples;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_samples);
    return t.amplitude * std::cos(angle + t.phase);
}

double weight(double h, double gamma) { return gamma == 0.0 ? 1.0 : std::pow(h, gamma); }

void check_series(const TimeSeries& series, double gamma) {
    if (series.size() < 3) throw SizeError("estimation needs at least 3 observations");
    if (gamma < 0.0) throw DomainError("gamma must be non-negative");
    if (gamma != 0.0) {
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (!(series[i] > 0.0)) {
                throw DomainError("gamma != 0 requires positive observations (index " + std::to_string(i) + ")");
            }
        }
    }
}

// Closed-form Gaussian estimates for increments dH_i = (alpha (level_{i-1} - H_{i-1}) + drift_{i-1}) dt + noise.
SDEParams closed_form(std::span<const double> h, std::span<const double> level, std::span<const double> drift,
                      double dt, double gamma) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < h.size(); ++i) {
        const double hg = weight(h[i - 1], gamma);
        const double gap = level[i - 1] - h[i - 1];
        const double d_drift = drift.empty() ? 0.0 : drift[i - 1] * dt;
        num += (h[i] - h[i - 1] - d_drift) * gap / (hg * hg);
        den += (gap / hg) * (gap / hg);
    }
    den *= dt;
    if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num)) {
        throw NumericError("degenerate reversion denominator (series coincides with its level)");
    }
    SDEParams p;
    p.gamma = gamma;
    p.alpha = num / den;
    if (!(p.alpha > 0.0)) {
        throw EstimationError("estimated reversion rate " + std::to_string(p.alpha) + " is not positive");
    }
    double ss = 0.0;
    for (std::size_t i = 1; i < h.size(); ++i) {
        const double hg = weight(h[i - 1], gamma);
        const double d_drift = drift.empty() ? 0.0 : drift[i - 1];
        const double r = (h[i] - h[i - 1] - (p.alpha * (level[i - 1] - h[i - 1]) + d_drift) * dt) / hg;
        ss += r * r;
    }
    const double T = static_cast<double>(h.size() - 1);
    p.sigma = std::sqrt(ss / (T * dt));
    return p;
}

}  // namespace

double HarmonicModel::evaluate(std::size_t n) const {
    if (n_samples == 0) throw ConfigError("harmonic model has no base length");
    double s = 0.0;
    for (const auto& t : terms) s += term_value(t, n, n_samples);
    return s;
}

std::vector<double> HarmonicModel::evaluate_range(std::size_t first, std::size_t count) const {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = evaluate(first + i);
    return out;
}

Phase1Result estimate_phase1(const TimeSeries& series, const trend::TrendEstimate& trend, double gamma) {
    check_series(series, gamma);
    if (trend.m.size() != series.size() || trend.m_dot.size() != series.size()) {
        throw SizeError("trend and series lengths differ");
    }
    Phase1Result r;
    r.params = closed_form(series.values(), trend.m, trend.m_dot, series.dt_years(), gamma);
    r.mu_hat.resize(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        r.mu_hat[i] = trend.m[i] + trend.m_dot[i] / r.params.alpha;
    }
    return r;
}

HarmonicModel extract_harmonics(std::span<const double> signal, double dt_years) {
    const std::size_t n = signal.size();
    if (n < 4) throw SizeError("harmonic extraction needs at least 4 samples");
    const std::size_t L = n / 2;  // N/2 (even) or (N-1)/2 (odd)
    const auto M = dft(signal, L);
    const double nd = static_cast<double>(n);

    HarmonicModel model;
    model.n_samples = n;
    model.base_period_years = nd * dt_years;
    model.terms.reserve(L + 1);
    model.terms.push_back({0, M[0].real() / nd, 0.0});
    for (std::size_t k = 1; k <= L; ++k) {
        const bool nyquist = (n % 2 == 0) && k == L;
        double phase = std::atan2(M[k].imag(), M[k].real());
        if (phase <= -std::numbers::pi) phase = std::numbers::pi;
        model.terms.push_back({k, (nyquist ? 1.0 : 2.0) * std::abs(M[k]) / nd, phase});
    }
    return model;
}

Truncation truncate_harmonics(const HarmonicModel& spectrum, const TruncationCriterion& criterion) {
    if (spectrum.terms.empty()) throw ConfigError("empty spectrum");
    if (!criterion.fixed_count && !(criterion.rms_tol && *criterion.rms_tol > 0.0)) {
        throw ConfigError("truncation needs a positive RMS tolerance or a fixed count");
    }
    const std::size_t n = spectrum.n_samples;
    const double nd = static_cast<double>(n);

    const HarmonicTerm* constant = nullptr;
    struct Candidate {
        const HarmonicTerm* term;
        double power;  // mean square of the term over one period
    };
    std::vector<Candidate> candidates;
    for (const auto& t : spectrum.terms) {
        if (t.k == 0) {
            constant = &t;
            continue;
        }
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = term_value(t, i, n);
            ss += v * v;
        }
        candidates.push_back({&t, ss / nd});
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return a.power != b.power ? a.power > b.power : a.term->k < b.term->k;
    });

    Truncation out;
    out.model.n_samples = n;
    out.model.base_period_years = spectrum.base_period_years;
    if (constant) out.model.terms.push_back(*constant);

    const std::size_t limit = criterion.fixed_count ? std::min(*criterion.fixed_count, candidates.size())
                                                    : candidates.size();
    for (std::size_t i = 0; i < limit; ++i) {
        const auto& c = candidates[i];
        out.rms_trace.push_back({i + 1, c.power});
        if (!criterion.fixed_count && c.power < *criterion.rms_tol) break;
        out.model.terms.push_back(*c.term);
    }
    std::sort(out.model.terms.begin(), out.model.terms.end(),
              [](const HarmonicTerm& a, const HarmonicTerm& b) { return a.k < b.k; });
    return out;
}

SDEParams estimate_phase2(const TimeSeries& series, const HarmonicModel& model, double gamma) {
    check_series(series, gamma);
    const auto level = model.evaluate_range(0, series.size());
    return closed_form(series.values(), level, {}, series.dt_years(), gamma);
}

ModelFit fit(const TimeSeries& series, const FitConfig& config) {
    const auto stats = describe(series);
    if (!(stats.std_dev > 0.0)) throw EstimationError("constant series: reversion is undefined");

    ModelFit f;
    f.config = config;
    f.label = series.label();
    f.start_date = series.start_date();
    f.dt_years = series.dt_years();
    f.n_samples = series.size();
    f.last_value = series[series.size() - 1];
    f.sigma_H = stats.std_dev;

    f.trend = trend::estimate_trend(series, config.lambda);
    auto p1 = estimate_phase1(series, f.trend, config.gamma);
    f.phase1 = p1.params;
    f.mu_hat = std::move(p1.mu_hat);

    const auto spectrum = extract_harmonics(f.mu_hat, series.dt_years());
    auto trunc = truncate_harmonics(spectrum, config.truncation);
    f.harmonics = std::move(trunc.model);
    f.rms_trace = std::move(trunc.rms_trace);
    f.phase2 = estimate_phase2(series, f.harmonics, config.gamma);
    return f;
}

nlohmann::json to_json(const HarmonicModel& model) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : model.terms) terms.push_back({{"k", t.k}, {"a", t.amplitude}, {"phi", t.phase}});
    return {{"base_period_years", model.base_period_years}, {"n_samples", model.n_samples}, {"terms", terms}};
}

HarmonicModel harmonic_model_from_json(const nlohmann::json& j) {
    HarmonicModel m;
    m.base_period_years = j.at("base_period_years").get<double>();
    m.n_samples = j.at("n_samples").get<std::size_t>();
    for (const auto& t : j.at("terms")) {
        m.terms.push_back({t.at("k").get<std::size_t>(), t.at("a").get<double>(), t.at("phi").get<double>()});
    }
    if (m.n_samples == 0) throw ConfigError("harmonic model n_samples must be positive");
    return m;
}

nlohmann::json to_json(const ModelFit& f) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& p : f.rms_trace) trace.push_back({{"L", p.harmonics}, {"rms", p.rms}});
    nlohmann::json truncation = nlohmann::json::object();
    if (f.config.truncation.fixed_count) truncation["fixed_count"] = *f.config.truncation.fixed_count;
    if (f.config.truncation.rms_tol) truncation["rms_tol"] = *f.config.truncation.rms_tol;
    auto j = to_json(f.harmonics);
    j["alpha"] = f.phase2.alpha;
    j["sigma"] = f.phase2.sigma;
    j["gamma"] = f.phase2.gamma;
    j["sigma_H"] = f.sigma_H;
    j["phase1"] = {{"alpha", f.phase1.alpha}, {"sigma", f.phase1.sigma}};
    j["rms_trace"] = trace;
    j["label"] = f.label;
    j["start_date"] = format_date(f.start_date);
    j["end_date"] = format_date(f.end_date());
    j["dt_years"] = f.dt_years;
    j["last_value"] = f.last_value;
    j["fit_config"] = {{"lambda", f.config.lambda}, {"gamma", f.config.gamma}, {"truncation", truncation}};
    return j;
}

ModelFit model_fit_from_json(const nlohmann::json& j) {
    try {
        ModelFit f;
        f.harmonics = harmonic_model_from_json(j);
        f.phase2 = {j.at("alpha").get<double>(), j.at("sigma").get<double>(), j.at("gamma").get<double>()};
        if (j.contains("phase1")) {
            f.phase1 = {j["phase1"].at("alpha").get<double>(), j["phase1"].at("sigma").get<double>(), f.phase2.gamma};
        }
        f.sigma_H = j.at("sigma_H").get<double>();
        for (const auto& p : j.value("rms_trace", nlohmann::json::array())) {
            f.rms_trace.push_back({p.at("L").get<std::size_t>(), p.at("rms").get<double>()});
        }
        f.label = j.value("label", std::string{});
        f.start_date = parse_date(j.at("start_date").get<std::string>());
        f.dt_years = j.value("dt_years", kDailyStep);
        f.n_samples = f.harmonics.n_samples;
        f.last_value = j.at("last_value").get<double>();
        f.config.gamma = f.phase2.gamma;
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model fit document: ") + e.what());
    }
}

}  // namespace hydro::harmonic
