#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace seedset {

/// SplitMix64 finalizer; used to derive independent stream keys from a
/// master seed and a list of tags (cell, replicate, purpose, ...).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t t : tags) h = mix64(h ^ mix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

/// Philox4x32-10 counter-based generator. A (key, stream) pair names an
/// independent sequence; the position within it is a plain block counter, so
/// any replicate can be regenerated without touching the others.
class Philox {
 public:
  Philox(std::uint64_t key, std::uint64_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        stream_(stream) {}

  std::uint32_t next_u32() noexcept {
    if (used_ == 4) refill();
    return block_[used_++];
  }

  std::uint64_t next_u64() noexcept {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Jump to an absolute block position within the stream.
  void seek(std::uint64_t block) noexcept {
    counter_ = block;
    used_ = 4;
    has_spare_ = false;
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Unbiased integer in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % n;
  }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace seedset
