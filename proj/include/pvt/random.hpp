#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pvt {

/// Deterministic random source keyed by (seed, stream id).
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The conversions to uniform and normal variates are done here
/// rather than through <random> distributions, whose algorithms differ between
/// standard libraries. Together this makes every seeded run bit-reproducible
/// across toolchains.
class RandomStream {
public:
    static constexpr std::string_view kAlgorithmId = "mt19937_64+splitmix64-key/u53/box-muller/v1";

    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double low, double high) { return low + (high - low) * uniform(); }
    double normal(double mean = 0.0, double sd = 1.0);
    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t index(std::uint64_t n);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Stream id for a (generation, candidate) pair, used by the population
/// optimizers so candidate draws do not depend on evaluation order.
std::uint64_t derive_stream(std::uint64_t a, std::uint64_t b);

/// Independent child seed for a named purpose (split, optimizer, init, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose);

} // namespace pvt
