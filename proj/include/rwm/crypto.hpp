#pragma once

#include <sodium.h>

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rwm/bits.hpp"

namespace rwm {

using Digest = std::array<std::uint8_t, 32>;

void ensure_sodium();

/// Incremental SHA-256 with framing helpers. Bit strings are absorbed as
/// (64-bit length, packed bytes) so distinct lengths never collide.
class Sha256 {
 public:
  Sha256();
  Sha256& update(std::span<const std::uint8_t> bytes);
  Sha256& update(std::string_view text);
  Sha256& update_u64(std::uint64_t value);
  Sha256& update_bits(const BitString& bits);
  Digest finish();

 private:
  crypto_hash_sha256_state state_{};
};

/// First `bits` bits of the digest, in the library's bit order.
BitString digest_prefix(const Digest& digest, std::size_t bits);

/// Counter-mode expansion of SHA-256 to an arbitrary number of bits.
BitString sha256_expand(std::string_view tag, std::span<const std::uint8_t> key, std::uint64_t input,
                        std::size_t bits);

Digest hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message);

}  // namespace rwm
