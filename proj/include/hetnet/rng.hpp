#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace hetnet {

/// Philox4x32-10 counter-based generator. Each
/// (key, stream, substream) triple names an independent sequence, so a
/// replication's draws depend only on its index and never on thread schedule.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t key, std::uint64_t stream, std::uint32_t substream = 0,
               bool complement = false) noexcept
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
          counter_{0, substream, static_cast<std::uint32_t>(stream),
                   static_cast<std::uint32_t>(stream >> 32)},
          complement_(complement) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (index_ == 4) {
            buffer_ = bijection(counter_, key_);
            ++counter_[0];
            index_ = 0;
        }
        const result_type x = buffer_[index_++];
        return complement_ ? ~x : x;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept {
        const std::uint64_t hi = (*this)() >> 5;  // 27 bits
        const std::uint64_t lo = (*this)() >> 6;  // 26 bits
        return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
    }

    /// Unit-mean exponential variate.
    double exponential() noexcept { return -std::log1p(-uniform()); }

    /// The raw 10-round Philox bijection.
    static Block bijection(Block ctr, Key key) noexcept {
        std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
        std::uint32_t k0 = key[0], k1 = key[1];
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c0;
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c2;
            const auto n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
            const auto n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
            c1 = static_cast<std::uint32_t>(p1);
            c3 = static_cast<std::uint32_t>(p0);
            c0 = n0;
            c2 = n2;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return {c0, c1, c2, c3};
    }

private:
    Key key_;
    Block counter_;
    Block buffer_{};
    int index_ = 4;
    bool complement_;
};

}  // namespace hetnet
