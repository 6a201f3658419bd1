#include "yule/rng.hpp"

namespace yule {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline PhiloxCounter round(const PhiloxCounter& c, const PhiloxKey& k) noexcept {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept {
    for (int i = 0; i < 10; ++i) {
        if (i > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        counter = round(counter, key);
    }
    return counter;
}

PhiloxStream::PhiloxStream(StreamId id) noexcept
    : id_(id),
      key_{static_cast<std::uint32_t>(id.seed), static_cast<std::uint32_t>(id.seed >> 32)} {}

void PhiloxStream::refill() noexcept {
    const PhiloxCounter ctr{block_, id_.process, static_cast<std::uint32_t>(id_.replication),
                            static_cast<std::uint32_t>(id_.replication >> 32)};
    const PhiloxCounter out = philox4x32_10(ctr, key_);
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    ++block_;
    used_ = 0;
}

PhiloxStream::result_type PhiloxStream::operator()() noexcept {
    if (used_ == 2) refill();
    return buffer_[used_++];
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) noexcept {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace yule
