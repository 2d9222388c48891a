#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace thzloc {

/// What a substream is used for. Part of the stream key so that changing how
/// many draws one purpose consumes never shifts another purpose's draws.
enum class StreamPurpose : std::uint64_t {
    mobility = 1,
    initial_energy = 2,
    harvesting = 3,
    operational_bits = 4,
    ranging_noise = 5,
    anchor_error = 6,
    seed_derivation = 7,
};

namespace detail {
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Hashes a list of integers into one 64-bit key.
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = 0x6A09E667F3BCC908ULL;
    for (auto p : parts) h = detail::splitmix64(h ^ detail::splitmix64(p));
    return h;
}

/// Counter-based generator: the whole stream is a pure function of its key,
/// so any (seed, iteration, node, purpose) tuple can be opened on any worker
/// without coordination. Satisfies UniformRandomBitGenerator.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit constexpr RandomStream(std::uint64_t key) noexcept : key_(key) {}

    static RandomStream for_node(std::uint64_t seed, std::uint64_t iteration, std::uint64_t node,
                                 StreamPurpose purpose) noexcept {
        return RandomStream(derive_key({seed, iteration, node, static_cast<std::uint64_t>(purpose)}));
    }

    static RandomStream for_iteration(std::uint64_t seed, std::uint64_t iteration,
                                      StreamPurpose purpose) noexcept {
        return for_node(seed, iteration, std::numeric_limits<std::uint64_t>::max(), purpose);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        return detail::splitmix64(key_ ^ detail::splitmix64(counter_++));
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(*this); }

    /// Normal draw; a zero std returns the mean without consuming entropy.
    double normal(double mean, double stddev) {
        if (stddev == 0.0) return mean;
        return std::normal_distribution<double>(mean, stddev)(*this);
    }

    bool bit() noexcept { return ((*this)() >> 63) != 0; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Seed for the point at `index` of a sweep derived from a master seed.
constexpr std::uint64_t derive_point_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
    return derive_key({master_seed, index, static_cast<std::uint64_t>(StreamPurpose::seed_derivation)});
}

}  // namespace thzloc
