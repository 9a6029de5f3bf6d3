#pragma once

#include <array>
#include <cstdint>

namespace gebridge {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// Stateless: every output block is a pure function of (key, counter).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t prod0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t prod1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(prod0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(prod0);
      const auto hi1 = static_cast<std::uint32_t>(prod1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(prod1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Uniform in (0, 1) keyed by (seed, replication, slot). Never returns 0 or 1.
inline double keyed_uniform(std::uint64_t seed, std::uint64_t rep, std::uint64_t slot) noexcept {
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed),
                               static_cast<std::uint32_t>(seed >> 32)};
  const Philox4x32::Counter ctr = {
      static_cast<std::uint32_t>(slot), static_cast<std::uint32_t>(slot >> 32),
      static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32)};
  const auto out = Philox4x32::block(ctr, key);
  const std::uint64_t bits = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace gebridge
