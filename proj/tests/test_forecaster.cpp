#include "hydro/errors.hpp"
#include "hydro/fixture.hpp"
#include "hydro/forecaster.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hydro;
using namespace hydro::forecast;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string l; std::getline(ss, l);) out.push_back(l);
    return out;
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("hydro_forecaster_" + name);
    std::filesystem::remove_all(p);
    return p;
}

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

harmonic::ModelFit small_fit() {
    harmonic::FitConfig cfg;
    cfg.truncation = harmonic::TruncationCriterion::count(2);
    return harmonic::fit(fixture::generate(fixture::reference_scale(4)).series, cfg);
}

}  // namespace

TEST(Multipliers, DefaultGrid) {
    const auto m = default_multipliers();
    ASSERT_EQ(m.size(), 22u);
    EXPECT_EQ(m.front(), 0.5);
    EXPECT_EQ(m.back(), 2.6);
    for (std::size_t i = 0; i < m.size(); ++i) EXPECT_NEAR(m[i], 0.5 + 0.1 * double(i), 1e-12);
}

TEST(Multipliers, Parse) {
    EXPECT_EQ(parse_multipliers("0.5:2.6:0.1"), default_multipliers());
    EXPECT_EQ(parse_multipliers("1,2, 3"), (std::vector<double>{1.0, 2.0, 3.0}));
    EXPECT_EQ(parse_multipliers("0"), (std::vector<double>{0.0}));
    EXPECT_THROW((void)parse_multipliers("1:2"), ConfigError);
    EXPECT_THROW((void)parse_multipliers("1:2:0"), ConfigError);
    EXPECT_THROW((void)parse_multipliers("2:1:0.1"), ConfigError);
    EXPECT_THROW((void)parse_multipliers("a,b"), ConfigError);
    EXPECT_THROW((void)parse_multipliers("1,,2"), ConfigError);
    EXPECT_THROW((void)parse_multipliers("-1"), ConfigError);
}

TEST(Bands, MultiplierZeroCollapses) {
    const std::vector<double> c{1.0, 2.0, 3.0};
    const std::vector<double> m{0.0};
    const auto b = build_bands(c, 0.4, m);
    EXPECT_EQ(b.lower[0], c);
    EXPECT_EQ(b.upper[0], c);
}

TEST(Bands, HalfWidth) {
    const std::vector<double> c(100, 7.3);
    const std::vector<double> m{1.0};
    const auto b = build_bands(c, 0.4323, m);
    for (std::size_t i = 0; i < 100; ++i) {
        EXPECT_NEAR(b.upper[0][i] - c[i], 0.4323, 1e-15);
        EXPECT_NEAR(c[i] - b.lower[0][i], 0.4323, 1e-15);
    }
}

TEST(Bands, Nest) {
    const auto fit = small_fit();
    const auto b = build_bands(fit, 1095, default_multipliers());
    EXPECT_EQ(b.horizon(), 1095u);
    for (std::size_t k = 1; k < b.multipliers.size(); ++k) {
        for (std::size_t i = 0; i < b.horizon(); ++i) {
            EXPECT_LE(b.lower[k][i], b.lower[k - 1][i]);
            EXPECT_GE(b.upper[k][i], b.upper[k - 1][i]);
            EXPECT_LE(b.lower[k][i], b.center[i]);
            EXPECT_GE(b.upper[k][i], b.center[i]);
        }
    }
}

TEST(Bands, CenterIsNextPeriodOfFittedLevel) {
    const auto fit = small_fit();
    const auto b = build_bands(fit, 1200, default_multipliers());
    for (std::size_t i = 0; i < 1200; ++i) EXPECT_EQ(b.center[i], fit.harmonics.evaluate(i % fit.n_samples));
    EXPECT_EQ(b.sigma_H, fit.sigma_H);
}

TEST(Bands, Errors) {
    const std::vector<double> none;
    const std::vector<double> one{1.0};
    EXPECT_THROW((void)build_bands({1.0}, 1.0, none), ConfigError);
    EXPECT_THROW((void)build_bands({}, 1.0, one), ConfigError);
    EXPECT_THROW((void)build_bands({1.0}, -1.0, one), DomainError);
    EXPECT_THROW((void)build_bands(small_fit(), 0, one), ConfigError);
}

TEST(Coverage, DeterministicEnsembleIsFullyCovered) {
    const auto fit = small_fit();
    auto f = fit;
    f.phase2.sigma = 0.0;
    const auto cfg = forecast_simulation(f, 365, 4, 1);
    const auto ens = sim::simulate_ensemble(f.harmonics, f.phase2, cfg);
    // Center on the deterministic path itself.
    std::vector<double> det(ens.path(0).begin() + 1, ens.path(0).end());
    const auto b = build_bands(det, 0.3, default_multipliers());
    for (double c : ensemble_coverage(ens, b)) EXPECT_EQ(c, 1.0);
}

TEST(Coverage, HoldoutEdgeCases) {
    std::vector<double> c(50);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 7.0 + 0.01 * double(i);
    const auto b = build_bands(c, 0.2, default_multipliers());
    for (double v : holdout_coverage(c, b)) EXPECT_EQ(v, 1.0);
    auto off = c;
    for (auto& v : off) v += 3.0 * 0.2;
    for (double v : holdout_coverage(off, b)) EXPECT_EQ(v, 0.0);
    // Boundary counts as inside.
    std::vector<double> edge(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) edge[i] = b.upper[0][i];
    EXPECT_EQ(holdout_coverage(edge, b)[0], 1.0);
}

TEST(Coverage, HoldoutMatchesBruteForce) {
    const auto c = testsupport::white_noise(300, 1, 0.1);
    const auto x = testsupport::white_noise(300, 2, 0.5);
    const auto b = build_bands(c, 0.3, default_multipliers());
    const auto got = holdout_coverage(x, b);
    for (std::size_t k = 0; k < b.multipliers.size(); ++k) {
        int inside = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (std::abs(x[i] - c[i]) <= b.multipliers[k] * 0.3 + 1e-15) ++inside;
        }
        EXPECT_EQ(got[k], double(inside) / 300.0) << b.multipliers[k];
    }
}

TEST(Coverage, EnsembleMatchesBruteForceAndIsMonotone) {
    const auto fit = small_fit();
    const auto cfg = forecast_simulation(fit, 200, 40, 9);
    const auto ens = sim::simulate_ensemble(fit.harmonics, fit.phase2, cfg);
    const auto b = build_bands(fit, 200, default_multipliers());
    const auto got = ensemble_coverage(ens, b);
    for (std::size_t k = 0; k < got.size(); ++k) {
        double total = 0.0;
        for (std::size_t p = 0; p < 40; ++p) {
            std::vector<double> row(ens.path(p).begin() + 1, ens.path(p).end());
            total += holdout_coverage(row, b)[k];
        }
        EXPECT_NEAR(got[k], total / 40.0, 1e-15);
        if (k > 0) {
            EXPECT_GE(got[k], got[k - 1]);
        }
    }
}

TEST(Coverage, ShiftInvariance) {
    const auto c = testsupport::white_noise(100, 5, 0.1);
    const auto x = testsupport::white_noise(100, 6, 0.4);
    auto cs = c, xs = x;
    for (auto& v : cs) v += 0.5;
    for (auto& v : xs) v += 0.5;
    // 0.5 is exact in binary, so shifted comparisons are exact too.
    EXPECT_EQ(holdout_coverage(x, build_bands(c, 0.25, default_multipliers())),
              holdout_coverage(xs, build_bands(cs, 0.25, default_multipliers())));
}

TEST(Coverage, SizeMismatchNamesBothLengths) {
    const auto b = build_bands(std::vector<double>(10, 1.0), 1.0, default_multipliers());
    try {
        (void)holdout_coverage(std::vector<double>(7, 1.0), b);
        FAIL();
    } catch (const SizeError& e) {
        EXPECT_NE(std::string(e.what()).find("7"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("10"), std::string::npos);
    }
    const auto fit = small_fit();
    const auto ens = sim::simulate_ensemble(fit.harmonics, fit.phase2, forecast_simulation(fit, 5, 2, 0));
    EXPECT_THROW((void)ensemble_coverage(ens, b), SizeError);
}

TEST(Coverage, DiscreteGaussianOracle) {
    // Constant mu equal to the center; the Euler chain is AR(1) with stationary sd
    // sigma sqrt(dt / (1 - (1 - alpha dt)^2)), started at stationarity's center.
    harmonic::ModelFit f;
    f.harmonics = {3.0, 1095, {{0, 7.39, 0.0}}};
    f.phase2 = {112.0, 3.0, 0.0};
    f.n_samples = 1095;
    f.last_value = 7.39;
    f.sigma_H = 0.4323;
    const auto ens = sim::simulate_ensemble(f.harmonics, f.phase2, forecast_simulation(f, 1095, 10000, 11));
    const auto b = build_bands(f, 1095, default_multipliers());
    const auto cov = ensemble_coverage(ens, b);
    const double a = 1.0 - 112.0 * kDailyStep;
    const double sd = 3.0 * std::sqrt(kDailyStep / (1.0 - a * a));
    for (std::size_t k = 0; k < cov.size(); ++k) {
        // Average the per-step Gaussian coverage, including the short transient from h0 = center.
        double expect = 0.0;
        double var = 0.0;
        for (std::size_t i = 1; i <= 1095; ++i) {
            var = a * a * var + 9.0 * kDailyStep;
            expect += 2.0 * phi(b.multipliers[k] * 0.4323 / std::sqrt(var)) - 1.0;
        }
        expect /= 1095.0;
        EXPECT_NEAR(cov[k], expect, 0.02) << b.multipliers[k];
        EXPECT_LT(std::abs(expect - (2.0 * phi(b.multipliers[k] * 0.4323 / sd) - 1.0)), 0.01);
    }
}

TEST(Table, RowsAndDifference) {
    const auto b = build_bands(std::vector<double>(4, 0.0), 1.0, default_multipliers());
    const std::vector<double> fc(22, 0.9);
    const auto t = coverage_table(b, fc, std::vector<double>(22, 0.95));
    ASSERT_EQ(t.rows.size(), 22u);
    for (const auto& r : t.rows) EXPECT_NEAR(*r.difference, 0.05, 1e-12);
    EXPECT_THROW((void)coverage_table(b, std::vector<double>(3, 0.0)), SizeError);
    const auto j = to_json(t);
    EXPECT_EQ(j.size(), 22u);
    EXPECT_TRUE(j[0].contains("difference"));
    EXPECT_FALSE(to_json(coverage_table(b, fc))[0].contains("holdout"));
}

TEST(Report, CsvLayoutWithHoldout) {
    const auto fit = small_fit();
    const auto ens = sim::simulate_ensemble(fit.harmonics, fit.phase2, forecast_simulation(fit, 1095, 20, 3));
    const auto hold = fixture::continuation(fit, 1095, 77);
    EXPECT_EQ(hold.start_date(), fit.end_date() + std::chrono::days{1});
    const auto r = forecast_report(fit, ens, default_multipliers(), hold);
    const auto dir = scratch("holdout");
    write_report(r, dir);

    const auto cov = lines(slurp(dir / "coverage.csv"));
    ASSERT_EQ(cov.size(), 23u);
    EXPECT_EQ(cov[0], "multiplier,forecast_pct,holdout_pct,difference_pct");
    EXPECT_EQ(cov[1].substr(0, 4), "0.5,");
    EXPECT_EQ(cov[22].substr(0, 4), "2.6,");
    for (std::size_t i = 1; i < cov.size(); ++i) {
        EXPECT_EQ(cov[i].find("-0.00"), std::string::npos);
        std::stringstream ss(cov[i]);
        std::string field;
        std::getline(ss, field, ',');
        for (int c = 0; c < 3; ++c) {
            std::getline(ss, field, ',');
            const auto dot = field.find('.');
            ASSERT_NE(dot, std::string::npos) << field;
            EXPECT_EQ(field.size() - dot, 3u) << field;
        }
    }

    const auto env = lines(slurp(dir / "envelope.csv"));
    EXPECT_EQ(env[0], "step,date,lower,upper,holdout");
    EXPECT_EQ(env.size(), 1097u);
    const auto bands = lines(slurp(dir / "bands.csv"));
    EXPECT_EQ(bands.size(), 1096u);
    EXPECT_EQ(bands[0].substr(0, 36), "step,date,center,lower_0.5,upper_0.5");
    EXPECT_NE(bands[0].find("upper_2.0,"), std::string::npos);
    EXPECT_EQ(bands[1].substr(0, 12), "1," + format_date(fit.end_date() + std::chrono::days{1}));
    EXPECT_EQ(lines(slurp(dir / "ensemble_summary.csv"))[0], "step,date,mean,min,max,q05,q95");
    std::filesystem::remove_all(dir);
}

TEST(Report, NoHoldoutOmitsColumns) {
    const auto fit = small_fit();
    const auto ens = sim::simulate_ensemble(fit.harmonics, fit.phase2, forecast_simulation(fit, 30, 4, 3));
    const auto r = forecast_report(fit, ens, default_multipliers());
    EXPECT_FALSE(r.holdout.has_value());
    const auto dir = scratch("plain");
    write_report(r, dir);
    EXPECT_EQ(lines(slurp(dir / "coverage.csv"))[0], "multiplier,forecast_pct");
    EXPECT_EQ(lines(slurp(dir / "envelope.csv"))[0], "step,date,lower,upper");
    std::filesystem::remove_all(dir);
}

TEST(Report, HoldoutShorterThanHorizon) {
    const auto fit = small_fit();
    const auto ens = sim::simulate_ensemble(fit.harmonics, fit.phase2, forecast_simulation(fit, 30, 4, 3));
    EXPECT_THROW((void)forecast_report(fit, ens, default_multipliers(), fixture::continuation(fit, 20, 1)), SizeError);
}

TEST(Report, SelfConsistencyStudy) {
    // Holdout drawn from the fitted model itself: holdout and forecast columns agree.
    double total = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto fit = harmonic::fit(fixture::generate(fixture::reference_scale(seed)).series);
        const auto ens = sim::simulate_ensemble(fit.harmonics, fit.phase2, forecast_simulation(fit, 1095, 1000, seed));
        const auto hold = fixture::continuation(fit, 1095, 1000 + seed);
        const auto r = forecast_report(fit, ens, default_multipliers(), hold);
        for (const auto& row : r.coverage.rows) {
            if (row.multiplier >= 1.0 - 1e-9) {
                total += std::abs(*row.difference);
                ++count;
            }
        }
    }
    EXPECT_LT(100.0 * total / count, 5.0);
}
