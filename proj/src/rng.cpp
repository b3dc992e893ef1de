// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#include "umcast/rng.hpp"

#include <cmath>
#include <numbers>

namespace umc
{
    std::uint64_t splitmix64(std::uint64_t x) noexcept
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t stream_key(std::uint64_t seed, StreamKind kind, std::uint64_t index) noexcept
    {
        std::uint64_t h = splitmix64(seed);
        h = splitmix64(h ^ static_cast<std::uint64_t>(kind));
        return splitmix64(h ^ index);
    }

    RandomStream::RandomStream(std::uint64_t seed, StreamKind kind, std::uint64_t index)
        : engine_(stream_key(seed, kind, index))
    {
    }

    double RandomStream::uniform()
    {
        // Top 53 bits, shifted by half an ulp so that 0 is never returned
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double RandomStream::normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    std::complex<double> RandomStream::complex_normal(double variance)
    {
        const double s = std::sqrt(0.5 * variance);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    void RandomStream::fill_complex_normal(std::span<std::complex<double>> out, double variance)
    {
        for (auto &z : out)
            z = complex_normal(variance);
    }

} // namespace umc
