#pragma once

#include <array>
#include <cstdint>

namespace latdecor {

/// Philox4x32-10 block function (Salmon et al., SC'11): a keyed bijection on
/// 128-bit counters. Stateless, so any (key, counter) can be evaluated directly.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            ctr = round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static Counter round(const Counter& c, const Key& k) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// Stream index for sample `index` of the operation identified by `tag`.
/// Tags occupy the top 16 bits, so streams of distinct tags never collide
/// for index < 2^48.
inline constexpr std::uint64_t stream_index(std::uint64_t tag, std::uint64_t index) {
    return (tag << 48) ^ index;
}

/// Sequential draws from the stream keyed by (seed, stream). The counter is
/// (stream lo, stream hi, 0, block), so distinct streams share no blocks.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0u, 0u} {}

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            buf_ = Philox4x32::generate(ctr_, key_);
            ++ctr_[3];
            if (ctr_[3] == 0) ++ctr_[2];
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    /// Uniform on [0, 1) with 53 random bits.
    double next_double() {
        const std::uint64_t hi = next_u32(), lo = next_u32();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

private:
    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    Philox4x32::Counter buf_{};
    int pos_ = 4;
};

}  // namespace latdecor
