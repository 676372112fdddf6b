#include "hydro/diagnostics.hpp"

#include "hydro/dft.hpp"
#include "hydro/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace hydro::diagnostics {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

Periodogram periodogram(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 4) throw SizeError("periodogram needs at least 4 observations");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> centered(x.begin(), x.end());
    double scale = 0.0, spread = 0.0;
    for (double& v : centered) {
        scale = std::max(scale, std::abs(v));
        v -= mean;
        spread = std::max(spread, std::abs(v));
    }
    // A numerically constant series leaves only rounding noise after centering.
    if (spread <= 8.0 * std::numeric_limits<double>::epsilon() * scale) {
        std::fill(centered.begin(), centered.end(), 0.0);
    }

    const std::size_t m = n / 2;
    const auto spectrum = dft(centered, m);
    Periodogram pg;
    pg.n = n;
    pg.frequencies.resize(m);
    pg.ordinates.resize(m);
    for (std::size_t k = 1; k <= m; ++k) {
        pg.frequencies[k - 1] = static_cast<double>(k) / static_cast<double>(n);
        pg.ordinates[k - 1] = std::norm(spectrum[k]) / static_cast<double>(n);
    }
    return pg;
}

double fisher_g_pvalue(double g, std::size_t m) {
    if (m < 2) throw SizeError("Fisher g distribution needs at least 2 ordinates");
    if (!(g > 0.0) || g > 1.0 + 1e-12) throw DomainError("g statistic outside (0, 1]");
    const double md = static_cast<double>(m);
    if (g <= 1.0 / md) return 1.0;
    const auto jmax = std::min<std::size_t>(m, static_cast<std::size_t>(std::floor(1.0 / g)));
    const double log_mfact = std::lgamma(md + 1.0);
    long double sum = 0.0L;
    for (std::size_t j = 1; j <= jmax; ++j) {
        const double base = 1.0 - static_cast<double>(j) * g;
        if (base <= 0.0) break;
        const double jd = static_cast<double>(j);
        const double log_term = log_mfact - std::lgamma(jd + 1.0) - std::lgamma(md - jd + 1.0) +
                                (md - 1.0) * std::log(base);
        const long double term = std::exp(static_cast<long double>(log_term));
        sum += (j % 2 == 1) ? term : -term;
    }
    return std::clamp(static_cast<double>(sum), 0.0, 1.0);
}

GTestResult fisher_g_test(const Periodogram& pg) {
    const auto& ord = pg.ordinates;
    if (ord.size() < 3) throw SizeError("Fisher g test needs at least 3 ordinates");
    double total = 0.0;
    for (double v : ord) total += v;
    const auto peak = std::max_element(ord.begin(), ord.end());
    if (!(total > 0.0) || *peak <= 0.0) throw DomainError("degenerate periodogram (no power)");
    GTestResult r;
    r.peak_index = static_cast<std::size_t>(peak - ord.begin());
    r.g = std::min(1.0, *peak / total);
    r.p_value = fisher_g_pvalue(r.g, ord.size());
    return r;
}

double bonferroni(double p_value, std::size_t count) {
    if (count == 0) throw ConfigError("Bonferroni count must be positive");
    return std::min(1.0, p_value * static_cast<double>(count));
}

JarqueBeraResult jarque_bera(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 8) throw SizeError("Jarque-Bera needs at least 8 observations");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double nd = static_cast<double>(n);
    m2 /= nd;
    m3 /= nd;
    m4 /= nd;
    if (!(m2 > 0.0)) throw DomainError("Jarque-Bera undefined for zero variance");
    JarqueBeraResult r;
    r.n = n;
    r.skewness = m3 / std::pow(m2, 1.5);
    r.kurtosis = m4 / (m2 * m2);
    const double excess = r.kurtosis - 3.0;
    r.statistic = nd / 6.0 * (r.skewness * r.skewness + excess * excess / 4.0);
    r.p_value = std::exp(-0.5 * r.statistic);  // chi-square, 2 dof
    return r;
}

std::size_t default_adf_max_lag(std::size_t n) {
    return static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

AdfCriticalValues adf_critical_values(std::size_t nobs) {
    const double t = static_cast<double>(nobs);
    auto surface = [t](double b0, double b1, double b2, double b3) {
        return b0 + b1 / t + b2 / (t * t) + b3 / (t * t * t);
    };
    return {surface(-3.43035, -6.5393, -16.786, -79.433),
            surface(-2.86154, -2.8903, -4.234, -40.040),
            surface(-2.56677, -1.5384, -2.809, 0.0)};
}

double adf_pvalue(double statistic) {
    constexpr double tau_max = 2.74;
    constexpr double tau_min = -18.83;
    constexpr double tau_star = -1.61;
    if (statistic > tau_max) return 1.0;
    if (statistic < tau_min) return 0.0;
    const double s = statistic;
    const double z = s <= tau_star ? 2.1659 + s * (1.4412 + s * 0.038269)
                                   : 1.7339 + s * (0.93202 + s * (-0.12745 + s * -0.010368));
    return normal_cdf(z);
}

namespace {

struct OlsFit {
    Eigen::VectorXd beta;
    double rss = 0.0;
    double se1 = 0.0;  // standard error of coefficient 1
};

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) throw NumericError("singular ADF regression");
    OlsFit fit;
    fit.beta = qr.solve(y);
    const Eigen::VectorXd resid = y - X * fit.beta;
    fit.rss = resid.squaredNorm();
    const auto dof = static_cast<double>(X.rows() - X.cols());
    if (dof <= 0.0) throw NumericError("ADF regression has no residual degrees of freedom");
    const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
    fit.se1 = std::sqrt(fit.rss / dof * xtx_inv(1, 1));
    return fit;
}

// Rows t = first..n-1 of dy_t on [1, x_{t-1}, dy_{t-1}..dy_{t-lag}], dy_t = x_t - x_{t-1}.
void adf_design(std::span<const double> x, std::size_t lag, std::size_t first,
                Eigen::MatrixXd& X, Eigen::VectorXd& y) {
    const std::size_t n = x.size();
    const auto rows = static_cast<Eigen::Index>(n - first);
    X.resize(rows, static_cast<Eigen::Index>(lag + 2));
    y.resize(rows);
    for (std::size_t t = first; t < n; ++t) {
        const auto r = static_cast<Eigen::Index>(t - first);
        y(r) = x[t] - x[t - 1];
        X(r, 0) = 1.0;
        X(r, 1) = x[t - 1];
        for (std::size_t j = 1; j <= lag; ++j) {
            X(r, static_cast<Eigen::Index>(j + 1)) = x[t - j] - x[t - j - 1];
        }
    }
}

}  // namespace

AdfResult adf_test(std::span<const double> x, std::optional<std::size_t> max_lag_opt) {
    const std::size_t n = x.size();
    std::size_t max_lag = max_lag_opt ? *max_lag_opt : default_adf_max_lag(n);
    if (!max_lag_opt) {
        // Keep the automatic choice feasible on short samples.
        while (max_lag > 0 && n < 2 * max_lag + 8) --max_lag;
    }
    if (n <= max_lag + 2) throw SizeError("ADF test needs more than max_lag + 2 observations");

    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::size_t best_lag = 0;
    double best_bic = std::numeric_limits<double>::infinity();
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        adf_design(x, lag, max_lag + 1, X, y);
        if (X.rows() <= X.cols()) break;
        const auto fit = ols(X, y);
        const double nobs = static_cast<double>(X.rows());
        const double bic = nobs * std::log(fit.rss / nobs) + static_cast<double>(X.cols()) * std::log(nobs);
        if (bic < best_bic) {
            best_bic = bic;
            best_lag = lag;
        }
    }

    adf_design(x, best_lag, best_lag + 1, X, y);
    const auto fit = ols(X, y);
    AdfResult r;
    r.lag = best_lag;
    r.max_lag = max_lag;
    r.nobs = static_cast<std::size_t>(X.rows());
    r.statistic = fit.beta(1) / fit.se1;
    r.p_value = adf_pvalue(r.statistic);
    r.critical = adf_critical_values(r.nobs);
    return r;
}

std::vector<VRResult> variance_ratio_test(std::span<const double> levels,
                                          std::span<const std::size_t> horizons) {
    if (horizons.empty()) throw ConfigError("variance ratio test needs at least one horizon");
    const std::size_t kmax = *std::max_element(horizons.begin(), horizons.end());
    if (levels.size() < 10 * kmax) {
        throw SizeError("variance ratio horizon " + std::to_string(kmax) + " too large for " +
                        std::to_string(levels.size()) + " observations");
    }
    const std::size_t T = levels.size() - 1;
    const double Td = static_cast<double>(T);
    const double mu = (levels[T] - levels[0]) / Td;

    std::vector<double> e(T);
    double sum_e2 = 0.0;
    for (std::size_t t = 1; t <= T; ++t) {
        e[t - 1] = levels[t] - levels[t - 1] - mu;
        sum_e2 += e[t - 1] * e[t - 1];
    }
    const double var_a = sum_e2 / (Td - 1.0);
    if (!(var_a > 0.0)) throw DomainError("variance ratio undefined for zero increment variance");

    std::vector<VRResult> out;
    out.reserve(horizons.size());
    for (std::size_t k : horizons) {
        if (k < 2) throw ConfigError("variance ratio horizons must be >= 2");
        const double kd = static_cast<double>(k);
        const double m = kd * (Td - kd + 1.0) * (1.0 - kd / Td);
        double ss = 0.0;
        for (std::size_t t = k; t <= T; ++t) {
            const double d = levels[t] - levels[t - k] - kd * mu;
            ss += d * d;
        }
        VRResult r;
        r.k = k;
        r.vr = (ss / m) / var_a;

        const double phi = 2.0 * (2.0 * kd - 1.0) * (kd - 1.0) / (3.0 * kd * Td);
        r.z_homo = (r.vr - 1.0) / std::sqrt(phi);

        double theta = 0.0;
        for (std::size_t j = 1; j < k; ++j) {
            double num = 0.0;
            for (std::size_t t = j; t < T; ++t) num += e[t] * e[t] * e[t - j] * e[t - j];
            const double delta = Td * num / (sum_e2 * sum_e2);
            const double w = 2.0 * (kd - static_cast<double>(j)) / kd;
            theta += w * w * delta;
        }
        r.z_robust = (r.vr - 1.0) / std::sqrt(theta / Td);
        r.p_homo = 2.0 * normal_cdf(-std::abs(r.z_homo));
        r.p_robust = 2.0 * normal_cdf(-std::abs(r.z_robust));
        out.push_back(r);
    }
    return out;
}

TestReport run_diagnostics(const TimeSeries& series, const ReportOptions& opts) {
    TestReport rep;
    rep.label = series.label();
    rep.n = series.size();
    rep.levels = describe(series);
    const auto diff = difference(series);
    rep.differences = describe(diff);
    rep.g_test = fisher_g_test(periodogram(series));
    rep.g_p_adjusted = bonferroni(rep.g_test.p_value, opts.simultaneous_tests);
    rep.jarque_bera = jarque_bera(diff);
    rep.adf_levels = adf_test(series, opts.adf_max_lag);
    rep.adf_differences = adf_test(diff, opts.adf_max_lag);
    rep.vr = variance_ratio_test(series, opts.vr_horizons);
    return rep;
}

namespace {

nlohmann::json adf_json(const char* name, const AdfResult& a) {
    return {{"name", name},
            {"statistic", a.statistic},
            {"p_value", a.p_value},
            {"params",
             {{"lag", a.lag},
              {"max_lag", a.max_lag},
              {"nobs", a.nobs},
              {"deterministic", "constant"},
              {"critical_values",
               {{"1%", a.critical.one_pct}, {"5%", a.critical.five_pct}, {"10%", a.critical.ten_pct}}}}}};
}

nlohmann::json describe_json(const char* name, const DescriptiveStats& d) {
    return {{"name", name},
            {"statistic", nullptr},
            {"p_value", nullptr},
            {"params", {{"mean", d.mean}, {"std_dev", d.std_dev}, {"n", d.n}}}};
}

}  // namespace

nlohmann::json to_json(const TestReport& r) {
    nlohmann::json tests = nlohmann::json::array();
    tests.push_back(describe_json("describe_levels", r.levels));
    tests.push_back(describe_json("describe_differences", r.differences));
    tests.push_back({{"name", "fisher_g"},
                     {"statistic", r.g_test.g},
                     {"p_value", r.g_test.p_value},
                     {"params",
                      {{"ordinates", r.n / 2},
                       {"peak_harmonic", r.g_test.peak_index + 1},
                       {"peak_period_samples",
                        static_cast<double>(r.n) / static_cast<double>(r.g_test.peak_index + 1)},
                       {"p_value_bonferroni", r.g_p_adjusted}}}});
    tests.push_back({{"name", "jarque_bera"},
                     {"statistic", r.jarque_bera.statistic},
                     {"p_value", r.jarque_bera.p_value},
                     {"params",
                      {{"series", "difference"},
                       {"n", r.jarque_bera.n},
                       {"skewness", r.jarque_bera.skewness},
                       {"kurtosis", r.jarque_bera.kurtosis}}}});
    tests.push_back(adf_json("adf_levels", r.adf_levels));
    tests.push_back(adf_json("adf_differences", r.adf_differences));
    for (const auto& v : r.vr) {
        tests.push_back({{"name", "variance_ratio"},
                         {"statistic", v.vr},
                         {"p_value", v.p_robust},
                         {"params",
                          {{"k", v.k},
                           {"z_robust", v.z_robust},
                           {"z_homo", v.z_homo},
                           {"p_value_homo", v.p_homo}}}});
    }
    return {{"label", r.label}, {"n", r.n}, {"tests", tests}};
}

std::string format_table(const std::vector<TestReport>& reports) {
    std::vector<std::pair<std::string, std::vector<std::string>>> rows;
    auto num = [](double v, const char* fmt = "%.4f") {
        char buf[32];
        std::snprintf(buf, sizeof buf, fmt, v);
        return std::string(buf);
    };
    auto add = [&](std::string name, auto&& cell) {
        std::vector<std::string> cells;
        for (const auto& r : reports) cells.push_back(cell(r));
        rows.emplace_back(std::move(name), std::move(cells));
    };
    add("g-statistic", [&](const TestReport& r) { return num(r.g_test.g, "%.6f"); });
    add("g p-value", [&](const TestReport& r) { return num(r.g_test.p_value, "%.6f"); });
    add("g p-value (Bonferroni)", [&](const TestReport& r) { return num(r.g_p_adjusted, "%.6f"); });
    add("Mean", [&](const TestReport& r) { return num(r.levels.mean); });
    add("Std. dev.", [&](const TestReport& r) { return num(r.levels.std_dev); });
    add("ADF", [&](const TestReport& r) { return num(r.adf_levels.statistic); });
    add("Diff. mean", [&](const TestReport& r) { return num(r.differences.mean); });
    add("Diff. std. dev.", [&](const TestReport& r) { return num(r.differences.std_dev); });
    add("Diff. ADF", [&](const TestReport& r) { return num(r.adf_differences.statistic); });
    add("Diff. Jarque-Bera", [&](const TestReport& r) { return num(r.jarque_bera.statistic); });
    add("Diff. JB p-value", [&](const TestReport& r) { return num(r.jarque_bera.p_value); });
    if (!reports.empty()) {
        for (std::size_t i = 0; i < reports.front().vr.size(); ++i) {
            const auto k = std::to_string(reports.front().vr[i].k);
            add("VR(" + k + ")", [&](const TestReport& r) { return i < r.vr.size() ? num(r.vr[i].vr) : "-"; });
            add("z(" + k + ") robust",
                [&](const TestReport& r) { return i < r.vr.size() ? num(r.vr[i].z_robust) : "-"; });
        }
    }

    std::size_t w0 = std::string("Statistic").size();
    for (const auto& row : rows) w0 = std::max(w0, row.first.size());
    std::vector<std::size_t> widths;
    for (std::size_t c = 0; c < reports.size(); ++c) {
        std::size_t w = reports[c].label.size();
        for (const auto& row : rows) w = std::max(w, row.second[c].size());
        widths.push_back(w);
    }
    std::ostringstream out;
    auto pad = [&](const std::string& s, std::size_t w, bool right) {
        const std::string fill(w > s.size() ? w - s.size() : 0, ' ');
        out << (right ? fill + s : s + fill);
    };
    pad("Statistic", w0, false);
    for (std::size_t c = 0; c < reports.size(); ++c) {
        out << "  ";
        pad(reports[c].label, widths[c], true);
    }
    out << '\n';
    for (const auto& [name, cells] : rows) {
        pad(name, w0, false);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            out << "  ";
            pad(cells[c], widths[c], true);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace hydro::diagnostics
