#include "hydro/errors.hpp"
#include "hydro/trend.hpp"

#include "support.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hydro;
using namespace hydro::trend;
using testsupport::max_abs_diff;

namespace {

// Dense (I + lambda D'D) m = x with an explicit second-difference matrix.
std::vector<double> dense_hp(const std::vector<double>& x, double lambda) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n - 2, n);
    for (Eigen::Index r = 0; r < n - 2; ++r) {
        D(r, r) = 1.0;
        D(r, r + 1) = -2.0;
        D(r, r + 2) = 1.0;
    }
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) + lambda * D.transpose() * D;
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(x.data(), n);
    const Eigen::VectorXd m = A.fullPivLu().solve(b);
    return {m.data(), m.data() + n};
}

std::vector<double> noisy_sinusoid(std::size_t n, std::uint64_t seed) {
    auto e = testsupport::white_noise(n, seed, 0.3);
    for (std::size_t i = 0; i < n; ++i) e[i] += 7.0 + 0.5 * std::sin(2.0 * std::numbers::pi * i / 90.0);
    return e;
}

}  // namespace

TEST(HpFilter, LinearInputIsFixedPoint) {
    for (double lambda : {1.0, 100.0, 40000.0, 1e7}) {
        std::vector<double> x(400);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = 3.5 - 0.0125 * static_cast<double>(i);
        EXPECT_LT(max_abs_diff(hp_filter(x, lambda), x), 1e-9) << lambda;
    }
}

TEST(HpFilter, ConstantInput) {
    const std::vector<double> x(50, 7.39);
    EXPECT_LT(max_abs_diff(hp_filter(x, 40000.0), x), 1e-10);
}

TEST(HpFilter, MatchesDenseSolveOnNoisySinusoid) {
    const auto x = noisy_sinusoid(200, 1);
    EXPECT_LT(max_abs_diff(hp_filter(x, 40000.0), dense_hp(x, 40000.0)), 1e-8);
}

TEST(HpFilter, MatchesDenseSolveAcrossSeeds) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> len(4, 500);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto x = testsupport::white_noise(len(rng), seed, 2.0);
        for (double lambda : {100.0, 40000.0, 1e7}) {
            EXPECT_LT(max_abs_diff(hp_filter(x, lambda), dense_hp(x, lambda)), 1e-8) << "seed " << seed;
        }
    }
}

TEST(HpFilter, Linear) {
    const auto x = noisy_sinusoid(300, 2);
    const auto y = testsupport::white_noise(300, 3);
    const double a = 1.7, b = -0.4;
    std::vector<double> z(300);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = a * x[i] + b * y[i];
    const auto fx = hp_filter(x, 40000.0), fy = hp_filter(y, 40000.0), fz = hp_filter(z, 40000.0);
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(fz[i], a * fx[i] + b * fy[i], 1e-9);
}

TEST(HpFilter, PreservesMean) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = noisy_sinusoid(365, seed);
        const auto m = hp_filter(x, 40000.0);
        double mx = 0.0, mm = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i];
            mm += m[i];
        }
        EXPECT_NEAR(mm / x.size(), mx / x.size(), 1e-9);
    }
}

TEST(HpFilter, VanishingLambdaReturnsInput) {
    const auto x = noisy_sinusoid(250, 4);
    // m = x - lambda D'D x + O(lambda^2)
    EXPECT_LT(max_abs_diff(hp_filter(x, 1e-8), x), 1e-6);
}

TEST(HpFilter, Errors) {
    EXPECT_THROW((void)hp_filter(std::vector<double>{1, 2, 3}, 1.0), SizeError);
    EXPECT_THROW((void)hp_filter(std::vector<double>{1, 2, 3, 4}, 0.0), DomainError);
}

TEST(ThreePointDerivative, ExactOnQuadratics) {
    const double dt = 1.0 / 365.0;
    std::vector<double> m(50);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = (i * dt) * (i * dt);
    const auto d = three_point_derivative(m, dt);
    for (std::size_t i = 0; i < m.size(); ++i) EXPECT_NEAR(d[i], 2.0 * i * dt, 1e-10);
}

TEST(ThreePointDerivative, ConstantIsZero) {
    for (double v : three_point_derivative(std::vector<double>(10, 4.2), 0.5)) EXPECT_EQ(v, 0.0);
}

TEST(ThreePointDerivative, SineAgainstAnalyticDerivative) {
    const double dt = 1.0 / 365.0;
    std::vector<double> m(365), truth(365);
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = std::sin(2.0 * std::numbers::pi * i * dt);
        truth[i] = 2.0 * std::numbers::pi * std::cos(2.0 * std::numbers::pi * i * dt);
    }
    EXPECT_LT(max_abs_diff(three_point_derivative(m, dt), truth), 1e-3);
}

TEST(ThreePointDerivative, Errors) {
    EXPECT_THROW((void)three_point_derivative(std::vector<double>{1, 2}, 1.0), SizeError);
    EXPECT_THROW((void)three_point_derivative(std::vector<double>{1, 2, 3}, 0.0), DomainError);
}

TEST(EstimateTrend, LinearSeries) {
    std::vector<double> x(100);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 7.0 + 0.002 * i;
    const TimeSeries s(Date{std::chrono::year{2004} / 2 / 5}, x);
    const auto t = estimate_trend(s);
    EXPECT_EQ(t.lambda, 40000.0);
    ASSERT_EQ(t.m.size(), x.size());
    ASSERT_EQ(t.m_dot.size(), x.size());
    EXPECT_LT(max_abs_diff(t.m, x), 1e-9);
    for (double v : t.m_dot) EXPECT_NEAR(v, 0.002 * 365.0, 1e-6);
}

TEST(EstimateTrend, ConstantSeries) {
    const TimeSeries s(Date{std::chrono::year{2004} / 2 / 5}, std::vector<double>(30, 7.0));
    const auto t = estimate_trend(s);
    for (std::size_t i = 0; i < 30; ++i) {
        EXPECT_NEAR(t.m[i], 7.0, 1e-10);
        EXPECT_NEAR(t.m_dot[i], 0.0, 1e-8);
    }
}

TEST(EstimateTrend, TracksPeriodicLevelOfSyntheticProcess) {
    // Euler path of the periodic mean-reversion process at the reference scale.
    const double alpha = 112.0, sigma = 3.0, dt = 1.0 / 365.0;
    const std::size_t n = 1095;
    auto mu = [&](std::size_t i) {
        const double w = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        return 7.39 + 0.29 * std::cos(3 * w - 2.77) + 0.22 * std::cos(6 * w + 2.82);
    };
    const double band = 2.0 * sigma / std::sqrt(static_cast<double>(n));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto e = testsupport::white_noise(n, seed);
        std::vector<double> h(n);
        h[0] = mu(0);
        for (std::size_t i = 1; i < n; ++i) h[i] = h[i - 1] + alpha * (mu(i - 1) - h[i - 1]) * dt + sigma * std::sqrt(dt) * e[i];
        const auto t = estimate_trend(TimeSeries(Date{std::chrono::year{2007} / 2 / 5}, h));
        const std::size_t margin = 30;
        std::size_t inside = 0;
        for (std::size_t i = margin; i < n - margin; ++i) inside += std::abs(t.m[i] - mu(i)) <= band ? 1 : 0;
        EXPECT_GE(static_cast<double>(inside) / static_cast<double>(n - 2 * margin), 0.9) << "seed " << seed;
    }
}
