#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

#include "rwm/bits.hpp"

namespace rwm {

using Seed = std::array<std::uint8_t, 32>;

/// Seedable ChaCha20 keystream. Every random choice in the library is drawn
/// from an injected Rng, so identical seeds give identical runs.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(const Seed& seed);
  static Rng from_u64(std::uint64_t seed);
  /// 64 hex digits, or any shorter hex string which is hashed to a seed.
  static Rng from_hex(std::string_view hex);
  /// Fresh seed from the operating system.
  static Rng from_entropy();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  void fill(std::span<std::uint8_t> out);
  Seed seed_bytes();
  double uniform01();
  bool bernoulli(double p);
  /// Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  BitString bits(std::size_t length);
  /// Independent child stream.
  Rng split();

 private:
  void refill();

  Seed key_{};
  std::uint64_t block_counter_ = 0;
  std::array<std::uint8_t, 1024> buffer_{};
  std::size_t pos_ = buffer_.size();
};

}  // namespace rwm
