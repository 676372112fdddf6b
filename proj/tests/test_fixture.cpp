#include "hydro/diagnostics.hpp"
#include "hydro/errors.hpp"
#include "hydro/fixture.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace hydro;
using namespace hydro::fixture;

TEST(Fixture, ReferenceScaleSpec) {
    const auto s = reference_scale(3);
    EXPECT_EQ(s.params.alpha, 112.0);
    EXPECT_EQ(s.params.sigma, 3.0);
    EXPECT_EQ(s.params.gamma, 0.0);
    EXPECT_EQ(s.n_steps, 1095u);
    EXPECT_EQ(s.harmonics.n_samples, 1095u);
    EXPECT_EQ(s.harmonics.terms.size(), 3u);
    EXPECT_EQ(s.seed, 3u);
}

TEST(Fixture, ShapeAndStart) {
    const auto f = generate(reference_scale(1));
    EXPECT_EQ(f.series.size(), 1095u);
    EXPECT_EQ(f.series[0], f.truth.harmonics.evaluate(0));
    EXPECT_EQ(format_date(f.series.start_date()), "2007-02-05");
    EXPECT_EQ(f.series.dt_years(), kDailyStep);
}

TEST(Fixture, MeanNearConstantTerm) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        EXPECT_NEAR(describe(generate(reference_scale(seed)).series).mean, 7.39, 0.1) << seed;
    }
}

TEST(Fixture, Deterministic) {
    EXPECT_EQ(generate(reference_scale(5)).series.values(), generate(reference_scale(5)).series.values());
    EXPECT_NE(generate(reference_scale(5)).series.values(), generate(reference_scale(6)).series.values());
}

TEST(Fixture, ZeroSigmaConvergesToLevel) {
    auto spec = reference_scale(0);
    spec.params.sigma = 0.0;
    spec.h0 = 9.0;
    const auto f = generate(spec);
    // Deterministic recursion written out.
    double h = 9.0;
    for (std::size_t i = 1; i < f.series.size(); ++i) {
        h += 112.0 * (spec.harmonics.evaluate(i - 1) - h) * kDailyStep;
        EXPECT_NEAR(f.series[i], h, 1e-12);
    }
    // After the transient the lag is at most about max|mu'| / alpha = 4.6 / 112.
    for (std::size_t i = 100; i < f.series.size(); ++i) EXPECT_NEAR(f.series[i], spec.harmonics.evaluate(i), 0.05);
}

TEST(Fixture, AntitheticPairMirrorsNoise) {
    auto spec = reference_scale(9);
    const auto [a, b] = generate_antithetic_pair(spec);
    spec.params.sigma = 0.0;
    const auto det = generate(spec).series;
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(0.5 * (a[i] + b[i]), det[i], 1e-12);
}

TEST(Fixture, TooShort) {
    auto spec = reference_scale(0);
    spec.n_steps = 1;
    EXPECT_THROW((void)generate(spec), ConfigError);
}

TEST(Fixture, PeriodicityDetected) {
    int rejected = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto g = diagnostics::fisher_g_test(diagnostics::periodogram(generate(reference_scale(seed)).series));
        rejected += g.p_value < 0.01 ? 1 : 0;
    }
    EXPECT_GE(rejected, 95);
}

TEST(Fixture, GaussianIncrements) {
    int accepted = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        accepted += diagnostics::jarque_bera(difference(generate(reference_scale(seed)).series)).p_value >= 0.05 ? 1 : 0;
    }
    EXPECT_GE(accepted, 90);
}

TEST(Fixture, MeanReversionDetected) {
    int ok = 0;
    const std::vector<std::size_t> k{16};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto vr = diagnostics::variance_ratio_test(generate(reference_scale(seed)).series.values(), k);
        ok += (vr[0].vr < 0.5 && vr[0].z_robust < -2.58) ? 1 : 0;
    }
    EXPECT_GE(ok, 95);
}

TEST(Fixture, JsonRoundTrip) {
    auto spec = reference_scale(12);
    spec.h0 = 7.0;
    const auto back = fixture_spec_from_json(nlohmann::json::parse(to_json(spec).dump()));
    EXPECT_EQ(back.params.alpha, spec.params.alpha);
    EXPECT_EQ(back.params.sigma, spec.params.sigma);
    EXPECT_EQ(back.n_steps, spec.n_steps);
    EXPECT_EQ(back.seed, spec.seed);
    EXPECT_EQ(back.h0, spec.h0);
    EXPECT_EQ(back.start_date, spec.start_date);
    EXPECT_EQ(generate(back).series.values(), generate(spec).series.values());
    EXPECT_THROW((void)fixture_spec_from_json(nlohmann::json::parse("{}")), ParseError);
}

TEST(Fixture, WritesCsvAndSidecar) {
    const auto dir = std::filesystem::temp_directory_path() / "hydro_fixture_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto f = generate(reference_scale(2));
    write_fixture(f, dir / "fx.csv");
    ASSERT_TRUE(std::filesystem::exists(dir / "fx.truth.json"));
    const auto back = read_series_csv(dir / "fx.csv");
    EXPECT_EQ(back.values(), f.series.values());
    EXPECT_EQ(back.start_date(), f.series.start_date());
    std::ifstream in(dir / "fx.truth.json");
    const auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j.at("alpha").get<double>(), 112.0);
    std::filesystem::remove_all(dir);
}

TEST(Continuation, StartsAfterFitWindow) {
    harmonic::FitConfig cfg;
    cfg.truncation = harmonic::TruncationCriterion::count(2);
    const auto fit = harmonic::fit(generate(reference_scale(3)).series, cfg);
    const auto c = continuation(fit, 400, 5);
    EXPECT_EQ(c.size(), 400u);
    EXPECT_EQ(c.start_date(), fit.end_date() + std::chrono::days{1});
    EXPECT_EQ(c.values(), continuation(fit, 400, 5).values());
    EXPECT_NE(c.values(), continuation(fit, 400, 6).values());
}
