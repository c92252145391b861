#pragma once

#include <array>
#include <cstdint>

namespace varinf {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A generator is identified by a 64-bit key (the root seed) and a 64-bit
/// stream index; the remaining 64 bits of the 128-bit counter enumerate
/// blocks within the stream. Streams with distinct indices never share a
/// counter value, so child streams are independent by construction and the
/// output depends only on (seed, stream, position).
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in the open interval (0, 1).
  double uniform_open();
  /// Standard normal via Box-Muller (both outputs used).
  double normal();

  /// Derives the stream index of a child from a parent stream and a tag.
  static std::uint64_t child_stream(std::uint64_t parent, std::uint64_t tag);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace varinf
