#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace hydro {

// Philox4x32-10 (Salmon et al., SC'11). Stateless: output is a pure function of (key, counter).
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t key) noexcept
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

    [[nodiscard]] Block operator()(Block ctr) const noexcept {
        auto k = key_;
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                k[0] += 0x9E3779B9u;
                k[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    std::array<std::uint32_t, 2> key_;
};

// Standard normal draws addressed by (seed, stream, index); Box-Muller on 53-bit uniforms.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept : philox_(seed), stream_(stream) {}

    // Writes draws index 0..out.size()-1 of this stream.
    void fill(std::span<double> out) const noexcept {
        for (std::size_t i = 0; i < out.size(); i += 2) {
            const auto pair = block(i / 2);
            out[i] = pair[0];
            if (i + 1 < out.size()) out[i + 1] = pair[1];
        }
    }

    [[nodiscard]] double at(std::uint64_t index) const noexcept { return block(index / 2)[index % 2]; }

private:
    [[nodiscard]] std::array<double, 2> block(std::uint64_t b) const noexcept {
        const auto x = philox_({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                                static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)});
        const double u1 = to_unit((std::uint64_t{x[0]} << 32) | x[1]);
        const double u2 = to_unit((std::uint64_t{x[2]} << 32) | x[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    // Open interval (0, 1).
    static double to_unit(std::uint64_t v) noexcept {
        return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
    }

    Philox4x32 philox_;
    std::uint64_t stream_;
};

}  // namespace hydro
