#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace liquiforge {

// Philox4x32-10 counter-based generator.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static Counter single_round(const Counter& c, const Key& k) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// Random draws addressed by (seed, path, step, stream); no generator state is carried.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    std::array<double, 4> uniforms(std::uint64_t path, std::uint32_t step, std::uint32_t stream) const {
        const auto r = Philox4x32::generate(
            {static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32), step, stream}, key_);
        return {to_unit(r[0], r[1]), to_unit(r[2], r[3]), to_unit(r[1], r[2]), to_unit(r[3], r[0])};
    }

    std::array<double, 2> normals(std::uint64_t path, std::uint32_t step, std::uint32_t stream = 0) const {
        const auto r = Philox4x32::generate(
            {static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32), step, stream}, key_);
        const double u1 = to_unit(r[0], r[1]);
        const double u2 = to_unit(r[2], r[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

    double uniform(std::uint64_t path, std::uint32_t step, std::uint32_t stream) const {
        return uniforms(path, step, stream)[0];
    }

private:
    // 53 random bits mapped to the open interval (0, 1).
    static double to_unit(std::uint32_t a, std::uint32_t b) {
        const std::uint64_t bits = (static_cast<std::uint64_t>(a) << 21) ^ (static_cast<std::uint64_t>(b) >> 11);
        return (static_cast<double>(bits & ((1ull << 53) - 1)) + 0.5) * 0x1.0p-53;
    }

    Philox4x32::Key key_;
};

} // namespace liquiforge
