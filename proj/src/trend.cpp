#include "hydro/trend.hpp"

#include "hydro/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hydro::trend {

namespace {

// Symmetric pentadiagonal matrix stored by its three upper diagonals.
struct Pentadiagonal {
    std::vector<double> d0, d1, d2;
};

Pentadiagonal hp_system(std::size_t n, double lambda) {
    Pentadiagonal a{std::vector<double>(n, 1.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    constexpr std::array<double, 3> c{1.0, -2.0, 1.0};
    for (std::size_t r = 0; r + 2 < n; ++r) {
        for (std::size_t i = 0; i < 3; ++i) {
            a.d0[r + i] += lambda * c[i] * c[i];
            if (i + 1 < 3) a.d1[r + i] += lambda * c[i] * c[i + 1];
            if (i + 2 < 3) a.d2[r + i] += lambda * c[i] * c[i + 2];
        }
    }
    return a;
}

// LDL' factors: unit lower bands l1 (sub-diagonal) and l2 (second sub-diagonal), pivots dd.
struct Factor {
    std::vector<double> dd, l1, l2;

    explicit Factor(const Pentadiagonal& a) {
        const std::size_t n = a.d0.size();
        dd.assign(n, 0.0);
        l1.assign(n, 0.0);  // l1[i] = L(i, i-1)
        l2.assign(n, 0.0);  // l2[i] = L(i, i-2)
        for (std::size_t i = 0; i < n; ++i) {
            if (i >= 2) l2[i] = a.d2[i - 2] / dd[i - 2];
            if (i >= 1) {
                double v = a.d1[i - 1];
                if (i >= 2) v -= l2[i] * l1[i - 1] * dd[i - 2];
                l1[i] = v / dd[i - 1];
            }
            double p = a.d0[i];
            if (i >= 1) p -= l1[i] * l1[i] * dd[i - 1];
            if (i >= 2) p -= l2[i] * l2[i] * dd[i - 2];
            if (!(p > 0.0)) throw NumericError("HP system is not positive definite");
            dd[i] = p;
        }
    }

    [[nodiscard]] std::vector<double> solve(std::span<const double> b) const {
        const std::size_t n = dd.size();
        std::vector<double> z(b.begin(), b.end());
        for (std::size_t i = 0; i < n; ++i) {
            if (i >= 1) z[i] -= l1[i] * z[i - 1];
            if (i >= 2) z[i] -= l2[i] * z[i - 2];
        }
        for (std::size_t i = 0; i < n; ++i) z[i] /= dd[i];
        for (std::size_t i = n; i-- > 0;) {
            if (i + 1 < n) z[i] -= l1[i + 1] * z[i + 1];
            if (i + 2 < n) z[i] -= l2[i + 2] * z[i + 2];
        }
        return z;
    }
};

}  // namespace

std::vector<double> hp_filter(std::span<const double> x, double lambda) {
    if (x.size() < 4) throw SizeError("HP filter needs at least 4 observations");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("HP lambda must be positive");
    const auto a = hp_system(x.size(), lambda);
    const Factor f(a);
    auto m = f.solve(x);

    // x - (I + lambda D'D) m, with D m formed first so large matrix entries never cancel.
    auto residual = [&](const std::vector<double>& m) {
        const std::size_t n = m.size();
        std::vector<double> dm(n - 2), r(n);
        for (std::size_t i = 0; i + 2 < n; ++i) dm[i] = (m[i] - m[i + 1]) - (m[i + 1] - m[i + 2]);
        for (std::size_t i = 0; i < n; ++i) {
            double dtd = 0.0;
            if (i < n - 2) dtd += dm[i];
            if (i >= 1 && i - 1 < n - 2) dtd -= 2.0 * dm[i - 1];
            if (i >= 2) dtd += dm[i - 2];
            r[i] = (x[i] - m[i]) - lambda * dtd;
        }
        return r;
    };
    // Large lambda makes the system ill-conditioned; a few refinement sweeps recover full accuracy.
    for (int sweep = 0; sweep < 3; ++sweep) {
        const auto dm = f.solve(residual(m));
        double size = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            m[i] += dm[i];
            size = std::max(size, std::abs(dm[i]));
        }
        if (size == 0.0) break;
    }
    return m;
}

std::vector<double> three_point_derivative(std::span<const double> m, double dt) {
    const std::size_t n = m.size();
    if (n < 3) throw SizeError("three-point derivative needs at least 3 points");
    if (!(dt > 0.0)) throw DomainError("derivative step must be positive");
    std::vector<double> out(n);
    const double h2 = 2.0 * dt;
    out[0] = (4.0 * (m[1] - m[0]) - (m[2] - m[0])) / h2;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (m[i + 1] - m[i - 1]) / h2;
    out[n - 1] = (4.0 * (m[n - 1] - m[n - 2]) - (m[n - 1] - m[n - 3])) / h2;
    return out;
}

TrendEstimate estimate_trend(const TimeSeries& series, double lambda) {
    TrendEstimate t;
    t.lambda = lambda;
    t.m = hp_filter(series.values(), lambda);
    t.m_dot = three_point_derivative(t.m, series.dt_years());
    return t;
}

}  // namespace hydro::trend
