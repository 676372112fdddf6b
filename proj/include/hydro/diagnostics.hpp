#pragma once

#include "hydro/series.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hydro::diagnostics {

// Raw periodogram at the Fourier frequencies k = 1..floor(n/2) of the
// mean-removed series. frequencies are in cycles per sample (k / n).
struct Periodogram {
    std::vector<double> frequencies;
    std::vector<double> ordinates;
    std::size_t n = 0;
};

struct GTestResult {
    double g = 0.0;
    double p_value = 1.0;
    std::size_t peak_index = 0;  // index into Periodogram::ordinates
};

struct JarqueBeraResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
    std::size_t n = 0;
};

struct AdfCriticalValues {
    double one_pct = 0.0;
    double five_pct = 0.0;
    double ten_pct = 0.0;
};

struct AdfResult {
    double statistic = 0.0;
    std::size_t lag = 0;
    std::size_t max_lag = 0;
    std::size_t nobs = 0;  // observations in the final regression
    double p_value = 1.0;  // MacKinnon (1994) approximation
    AdfCriticalValues critical;
};

struct VRResult {
    std::size_t k = 2;
    double vr = 1.0;
    double z_robust = 0.0;
    double z_homo = 0.0;
    double p_robust = 1.0;  // two-sided, standard normal
    double p_homo = 1.0;
};

[[nodiscard]] Periodogram periodogram(std::span<const double> x);
[[nodiscard]] inline Periodogram periodogram(const TimeSeries& s) { return periodogram(s.values()); }

// Exact null tail P(g > x) for m periodogram ordinates (Fisher 1929).
[[nodiscard]] double fisher_g_pvalue(double g, std::size_t m);
[[nodiscard]] GTestResult fisher_g_test(const Periodogram& pg);

// Bonferroni adjustment across `count` simultaneous tests.
[[nodiscard]] double bonferroni(double p_value, std::size_t count);

[[nodiscard]] JarqueBeraResult jarque_bera(std::span<const double> x);
[[nodiscard]] inline JarqueBeraResult jarque_bera(const TimeSeries& s) { return jarque_bera(s.values()); }

// floor(12 (n/100)^{1/4})
[[nodiscard]] std::size_t default_adf_max_lag(std::size_t n);
// MacKinnon (2010) response surface, constant and no trend.
[[nodiscard]] AdfCriticalValues adf_critical_values(std::size_t nobs);
// MacKinnon (1994) approximate p-value for the constant, no trend case.
[[nodiscard]] double adf_pvalue(double statistic);
// Regression with constant; lag order picked by BIC over 0..max_lag.
[[nodiscard]] AdfResult adf_test(std::span<const double> x, std::optional<std::size_t> max_lag = {});
[[nodiscard]] inline AdfResult adf_test(const TimeSeries& s, std::optional<std::size_t> max_lag = {}) {
    return adf_test(s.values(), max_lag);
}

// Lo-MacKinlay overlapping variance ratio on a level series (log prices,
// log discharge, ...). Increments are formed internally.
[[nodiscard]] std::vector<VRResult> variance_ratio_test(std::span<const double> levels,
                                                        std::span<const std::size_t> horizons);
[[nodiscard]] inline std::vector<VRResult> variance_ratio_test(const TimeSeries& s,
                                                               std::span<const std::size_t> horizons) {
    return variance_ratio_test(s.values(), horizons);
}

[[nodiscard]] double normal_cdf(double z);

struct TestReport {
    std::string label;
    std::size_t n = 0;
    DescriptiveStats levels;
    DescriptiveStats differences;
    GTestResult g_test;
    double g_p_adjusted = 1.0;
    JarqueBeraResult jarque_bera;  // on first differences
    AdfResult adf_levels;
    AdfResult adf_differences;
    std::vector<VRResult> vr;
};

struct ReportOptions {
    std::optional<std::size_t> adf_max_lag;
    std::vector<std::size_t> vr_horizons{2, 4, 8, 16};
    std::size_t simultaneous_tests = 1;  // Bonferroni count for the g test
};

[[nodiscard]] TestReport run_diagnostics(const TimeSeries& series, const ReportOptions& opts = {});

// [{name, statistic, p_value, params}, ...]
[[nodiscard]] nlohmann::json to_json(const TestReport& report);
// Aligned text table, one column per report.
[[nodiscard]] std::string format_table(const std::vector<TestReport>& reports);

}  // namespace hydro::diagnostics
