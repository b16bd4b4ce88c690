// include/latgen/rng.hpp: counter-based random streams.
//
// Philox4x32-10 (Salmon et al., SC'11). Key = 64-bit seed, counter = (stream
// id, block index), so every (seed, stream) pair names an independent,
// platform-independent sequence. Words are consumed low lane first.

#pragma once

#include "latgen/numeric.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace latgen {

class RngStream {
  public:
    static constexpr std::string_view algorithm_id = "philox4x32-10";

    RngStream(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }
    std::uint64_t blocks_used() const noexcept { return block_; }

    std::uint32_t next_u32() {
        if (lane_ == 4) refill();
        return buf_[lane_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on [0, bound), bound >= 1, by rejection (no modulo bias).
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("uniform_below: empty range");
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x <= limit) return x % bound;
        }
    }

    // Uniform on [0, bound) for arbitrary-size bound >= 1.
    Integer uniform_below(const Integer& bound) {
        if (sgn(bound) <= 0) throw std::invalid_argument("uniform_below: empty range");
        if (bound.fits_ulong_p()) return Integer(uniform_below(static_cast<std::uint64_t>(bound.get_ui())));
        const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
        for (;;) {
            Integer x = 0;
            std::size_t have = 0;
            while (have < bits) {
                x = (x << 32) + static_cast<unsigned long>(next_u32());
                have += 32;
            }
            x >>= static_cast<unsigned long>(have - bits);
            if (x < bound) return x;
        }
    }

    // Uniform on the closed integer range [lo, hi].
    Integer uniform_in(const Integer& lo, const Integer& hi) {
        if (hi < lo) throw std::invalid_argument("uniform_in: empty range");
        return lo + uniform_below(Integer(hi - lo + 1));
    }

    std::int64_t uniform_in(std::int64_t lo, std::int64_t hi) {
        if (hi < lo) throw std::invalid_argument("uniform_in: empty range");
        const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
        if (span == UINT64_MAX) return static_cast<std::int64_t>(next_u64());
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + uniform_below(span + 1));
    }

    // One Philox4x32-10 block; exposed for known-answer tests.
    static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
        constexpr std::uint32_t M0 = 0xD2511F53, M1 = 0xCD9E8D57;
        constexpr std::uint32_t W0 = 0x9E3779B9, W1 = 0xBB67AE85;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{M0} * c[0];
            const std::uint64_t p1 = std::uint64_t{M1} * c[2];
            c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
            k[0] += W0;
            k[1] += W1;
        }
        return c;
    }

  private:
    void refill() {
        std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                         static_cast<std::uint32_t>(stream_),
                                         static_cast<std::uint32_t>(stream_ >> 32)};
        std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
        buf_ = philox(ctr, key);
        ++block_;
        lane_ = 0;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int lane_ = 4;
};

} // namespace latgen
