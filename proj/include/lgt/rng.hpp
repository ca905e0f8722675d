#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace lgt {

// Philox4x32-10 (Salmon et al., SC'11).  Stateless: the output is a pure
// function of (key, counter), so streams can be addressed by
// (seed, step, site, channel) without any shared generator state.
struct Philox4x32
{
    using ctr_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static ctr_type apply(ctr_type c, key_type k)
    {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                k[0] += 0x9E3779B9u;
                k[1] += 0xBB67AE85u;
            }
            std::uint64_t p0 = std::uint64_t(0xD2511F53u) * c[0];
            std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * c[2];
            c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1),
                 std::uint32_t(p0 >> 32) ^ c[3] ^ k[1], std::uint32_t(p0)};
        }
        return c;
    }
};

// uniform in (0, 1), 53 bits
inline double to_unit(std::uint32_t hi, std::uint32_t lo)
{
    std::uint64_t b = ((std::uint64_t(hi) << 32) | lo) >> 11;
    return (double(b) + 0.5) * 0x1.0p-53;
}

// Two standard normals for one (seed, step, site, channel) address.
inline std::pair<double, double> gaussian_pair(std::uint64_t seed, std::uint64_t step,
                                               std::uint32_t site, std::uint32_t channel)
{
    Philox4x32::ctr_type c{std::uint32_t(step), std::uint32_t(step >> 32), site, channel};
    Philox4x32::key_type k{std::uint32_t(seed), std::uint32_t(seed >> 32)};
    auto r = Philox4x32::apply(c, k);
    double u1 = to_unit(r[0], r[1]);
    double u2 = to_unit(r[2], r[3]);
    double rad = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * M_PI * u2;
    return {rad * std::cos(th), rad * std::sin(th)};
}

} // namespace lgt
