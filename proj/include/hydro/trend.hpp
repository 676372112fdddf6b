#pragma once

#include "hydro/series.hpp"

#include <span>
#include <vector>

namespace hydro::trend {

inline constexpr double kDefaultLambda = 40000.0;

struct TrendEstimate {
    std::vector<double> m;      // smoothed expected-value path
    std::vector<double> m_dot;  // d m / dt, per year
    double lambda = kDefaultLambda;
};

// Hodrick-Prescott trend: minimiser of sum (x - m)^2 + lambda sum (second difference of m)^2,
// from a banded LDL' solve of (I + lambda D'D) m = x.
[[nodiscard]] std::vector<double> hp_filter(std::span<const double> x, double lambda);

// Central differences inside, one-sided three-point rules at both ends.
[[nodiscard]] std::vector<double> three_point_derivative(std::span<const double> m, double dt);

[[nodiscard]] TrendEstimate estimate_trend(const TimeSeries& series, double lambda = kDefaultLambda);

}  // namespace hydro::trend
