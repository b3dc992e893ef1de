// SPDX-License-Identifier: Apache-2.0
//
// umcast - joint unicast and multi-group multicast massive MIMO toolkit
// ------------------------------------------------------------------------

#ifndef UMCAST_RNG_HPP
#define UMCAST_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <span>

namespace umc
{
    // Sub-stream purposes. Mixed into the stream key so that different consumers never share draws.
    enum class StreamKind : std::uint64_t
    {
        placement = 1,
        channel = 2,
        noise = 3,
        trial = 4,
        drop = 5,
    };

    std::uint64_t splitmix64(std::uint64_t x) noexcept;

    // Key of the sub-stream (seed, kind, index). The mapping is a fixed bit-mixing function,
    // so any (seed, kind, index) triple reproduces the same sequence on every platform.
    std::uint64_t stream_key(std::uint64_t seed, StreamKind kind, std::uint64_t index) noexcept;

    // Reproducible random source. The engine (mt19937_64) is fully specified by the standard; the
    // uniform and Gaussian transforms are implemented here because the std distributions are not.
    class RandomStream
    {
    public:
        RandomStream(std::uint64_t seed, StreamKind kind, std::uint64_t index = 0);

        // Uniform on (0, 1), 53-bit resolution
        double uniform();

        // N(0, 1) via Box-Muller
        double normal();

        // CN(0, variance): independent real and imaginary parts with variance / 2 each
        std::complex<double> complex_normal(double variance = 1.0);

        void fill_complex_normal(std::span<std::complex<double>> out, double variance = 1.0);

    private:
        std::mt19937_64 engine_;
        double spare_ = 0.0;
        bool has_spare_ = false;
    };

} // namespace umc

#endif
