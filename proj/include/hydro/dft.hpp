#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hydro {

// Direct DFT M_k = sum_t x_t exp(-i 2 pi k t / N) for k = 0..k_max, any N.
// Twiddles come from a table indexed by (k t) mod N, so every angle is exact
// to table precision regardless of k t.
[[nodiscard]] std::vector<std::complex<double>> dft(std::span<const double> x, std::size_t k_max);

// Shared twiddle table: cos/sin of 2 pi j / N, j = 0..N-1.
class TwiddleTable {
public:
    explicit TwiddleTable(std::size_t n);
    [[nodiscard]] std::size_t size() const noexcept { return cos_.size(); }
    [[nodiscard]] double cos_at(std::size_t j) const noexcept { return cos_[j]; }
    [[nodiscard]] double sin_at(std::size_t j) const noexcept { return sin_[j]; }

private:
    std::vector<double> cos_;
    std::vector<double> sin_;
};

}  // namespace hydro
