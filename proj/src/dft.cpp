#include "hydro/dft.hpp"

#include <cmath>
#include <numbers>

namespace hydro {

TwiddleTable::TwiddleTable(std::size_t n) : cos_(n), sin_(n) {
    // Fill by symmetry so cos/sin at j and n-j agree exactly.
    for (std::size_t j = 0; j < n; ++j) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        cos_[j] = std::cos(angle);
        sin_[j] = std::sin(angle);
    }
    for (std::size_t j = 1; 2 * j < n; ++j) {
        cos_[n - j] = cos_[j];
        sin_[n - j] = -sin_[j];
    }
    if (n % 2 == 0 && n > 0) {
        cos_[n / 2] = -1.0;
        sin_[n / 2] = 0.0;
    }
    if (n % 4 == 0 && n > 0) {
        cos_[n / 4] = 0.0;
        sin_[n / 4] = 1.0;
        cos_[3 * n / 4] = 0.0;
        sin_[3 * n / 4] = -1.0;
    }
}

std::vector<std::complex<double>> dft(std::span<const double> x, std::size_t k_max) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(k_max + 1);
    if (n == 0) return out;
    const TwiddleTable tw(n);
    for (std::size_t k = 0; k <= k_max; ++k) {
        const std::size_t step = k % n;
        double re = 0.0, im = 0.0;
        std::size_t j = 0;
        for (std::size_t t = 0; t < n; ++t) {
            re += x[t] * tw.cos_at(j);
            im -= x[t] * tw.sin_at(j);
            j += step;
            if (j >= n) j -= n;
        }
        out[k] = {re, im};
    }
    return out;
}

}  // namespace hydro
