#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace dynwalk {

// Stream ids within one replication. Each (seed, replication, stream)
// triple seeds an independent engine.
enum class Stream : std::uint32_t {
    Environment = 0,
    Walker = 1,
    SecondWalker = 2,
};

/// Reproducible random source. Uniforms are built from the raw 64-bit
/// output so results do not depend on the standard library's distribution
/// implementations.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t replication, Stream stream)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(replication), static_cast<std::uint32_t>(replication >> 32),
                          static_cast<std::uint32_t>(stream), 0x64796e77u};
        engine_.seed(seq);
    }

    // Uniform on (0, 1).
    double uniform()
    {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    // Uniform integer in [0, n), rejection-sampled.
    std::uint64_t index(std::uint64_t n)
    {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x = engine_();
        while (x >= limit)
            x = engine_();
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace dynwalk
