#pragma once

#include <rampfe/normal.hpp>

#include <array>
#include <cstdint>

namespace rampfe {

/*! Philox4x32-10 counter-based generator (Salmon et al., SC'11).
    Output is a pure function of (counter, key), so any path can be
    regenerated independently of how work is scheduled.
*/
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }
};

//! Gaussian stream for one simulation path, keyed by (seed, path index, stream id).
class PathNormalStream {
  public:
    PathNormalStream(std::uint64_t seed, std::uint64_t path, std::uint32_t stream = 0) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      path_lo_(static_cast<std::uint32_t>(path)), path_hi_(static_cast<std::uint32_t>(path >> 32)),
      stream_(stream) {}

    //! Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept {
        if (cursor_ == 2)
            refill();
        return buffer_[cursor_++];
    }

    double normal() noexcept { return normal_quantile(uniform()); }

    std::uint32_t blocks_used() const noexcept { return block_; }

  private:
    void refill() noexcept {
        const auto out = Philox4x32::generate({block_++, path_lo_, path_hi_, stream_}, key_);
        buffer_[0] = to_unit(out[0], out[1]);
        buffer_[1] = to_unit(out[2], out[3]);
        cursor_ = 0;
    }

    static double to_unit(std::uint32_t a, std::uint32_t b) noexcept {
        const std::uint64_t bits = (std::uint64_t{a} << 21) ^ (std::uint64_t{b} >> 11);
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    Philox4x32::Key key_;
    std::uint32_t path_lo_;
    std::uint32_t path_hi_;
    std::uint32_t stream_;
    std::uint32_t block_ = 0;
    std::array<double, 2> buffer_{};
    int cursor_ = 2;
};

} // namespace rampfe
