#pragma once

#include <array>
#include <cstdint>

namespace atomreg {

/// Philox4x32-10 counter-based generator. The key is the 64-bit root seed and
/// the counter is (stream, index), so every stream is an independent,
/// replayable sequence.
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream);

  /// Next raw 32-bit word.
  std::uint32_t next_u32();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (both variates are used).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Stream id for trial `trial` of sub-experiment `tag`.
std::uint64_t stream_id(std::uint64_t tag, std::uint64_t trial);

}  // namespace atomreg
