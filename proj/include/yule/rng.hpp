#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace yule {

// Philox4x32-10 counter-based block cipher (Salmon, Moraes, Dror, Shaw 2011).
// Maps (counter, key) to 128 pseudo-random bits with no internal state, so any
// stream position can be produced independently.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

// Identity of one random stream: (experiment seed, replication, process).
// Distinct identities give statistically independent streams.
struct StreamId {
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    std::uint32_t process = 0;
};

// A UniformRandomBitGenerator over one Philox stream. The seed is the cipher
// key; replication and process occupy the upper 96 counter bits and the lower
// 32 bits count blocks, so a stream yields 2^33 64-bit words.
class PhiloxStream {
public:
    using result_type = std::uint64_t;

    explicit PhiloxStream(StreamId id) noexcept;
    PhiloxStream(std::uint64_t seed, std::uint64_t replication, std::uint32_t process) noexcept
        : PhiloxStream(StreamId{seed, replication, process}) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    const StreamId& id() const noexcept { return id_; }

private:
    void refill() noexcept;

    StreamId id_;
    PhiloxKey key_;
    std::uint32_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    unsigned used_ = 2;
};

// SplitMix64 finalizer; used to derive per-cell seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) noexcept;

// Standard normal variates drawn from a PhiloxStream. Uses Boost's ziggurat
// sampler so draws are reproducible across standard libraries.
class NormalSource {
public:
    explicit NormalSource(StreamId id) : engine_(id) {}
    NormalSource(std::uint64_t seed, std::uint64_t replication, std::uint32_t process)
        : engine_(seed, replication, process) {}

    double operator()() { return dist_(engine_); }

    const StreamId& id() const noexcept { return engine_.id(); }

private:
    PhiloxStream engine_;
    boost::random::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace yule
