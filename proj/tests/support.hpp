#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Test-only generators. They use std::mt19937_64 on purpose so that the
// library's own Philox streams are never the oracle for themselves.
namespace testsupport {

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, sd);
    std::vector<double> x(n);
    for (auto& v : x) v = z(rng);
    return x;
}

inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed, double start = 0.0) {
    auto e = white_noise(n, seed);
    std::vector<double> x(n);
    double level = start;
    for (std::size_t i = 0; i < n; ++i) {
        level += e[i];
        x[i] = level;
    }
    return x;
}

inline std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed) {
    auto e = white_noise(n, seed);
    std::vector<double> x(n);
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        prev = phi * prev + e[i];
        x[i] = prev;
    }
    return x;
}

// Euler path of dH = alpha (mu - H) dt + sigma dB with constant mu, H_0 = mu.
inline std::vector<double> ou_path(double alpha, double sigma, double mu, double dt, std::size_t n,
                                   std::uint64_t seed) {
    auto e = white_noise(n, seed);
    std::vector<double> h(n);
    h[0] = mu;
    for (std::size_t i = 1; i < n; ++i) {
        h[i] = h[i - 1] + alpha * (mu - h[i - 1]) * dt + sigma * std::sqrt(dt) * e[i];
    }
    return h;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testsupport
