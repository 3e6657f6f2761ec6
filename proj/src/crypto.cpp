#include "rwm/crypto.hpp"

#include <stdexcept>

namespace rwm {

void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium initialisation failed");
}

Sha256::Sha256() {
  ensure_sodium();
  crypto_hash_sha256_init(&state_);
}

Sha256& Sha256::update(std::span<const std::uint8_t> bytes) {
  crypto_hash_sha256_update(&state_, bytes.data(), bytes.size());
  return *this;
}

Sha256& Sha256::update(std::string_view text) {
  update_u64(text.size());
  crypto_hash_sha256_update(&state_, reinterpret_cast<const unsigned char*>(text.data()), text.size());
  return *this;
}

Sha256& Sha256::update_u64(std::uint64_t value) {
  std::uint8_t buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(value >> (8 * i));
  crypto_hash_sha256_update(&state_, buf, sizeof(buf));
  return *this;
}

Sha256& Sha256::update_bits(const BitString& bits) {
  update_u64(bits.size());
  const auto bytes = bits.to_bytes();
  return update(bytes);
}

Digest Sha256::finish() {
  Digest out{};
  crypto_hash_sha256_final(&state_, out.data());
  return out;
}

BitString digest_prefix(const Digest& digest, std::size_t bits) {
  if (bits > digest.size() * 8) throw std::invalid_argument("digest prefix longer than digest");
  BitString out = BitString::from_bytes(digest, digest.size() * 8);
  out.resize(bits);
  return out;
}

BitString sha256_expand(std::string_view tag, std::span<const std::uint8_t> key, std::uint64_t input,
                        std::size_t bits) {
  BitString out;
  for (std::uint64_t counter = 0; out.size() < bits; ++counter) {
    const auto d = Sha256().update(tag).update(key).update_u64(input).update_u64(counter).finish();
    const std::size_t take = std::min<std::size_t>(256, bits - out.size());
    out.append(digest_prefix(d, take));
  }
  return out;
}

Digest hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message) {
  ensure_sodium();
  crypto_auth_hmacsha256_state st;
  crypto_auth_hmacsha256_init(&st, key.data(), key.size());
  crypto_auth_hmacsha256_update(&st, message.data(), message.size());
  Digest out{};
  crypto_auth_hmacsha256_final(&st, out.data());
  return out;
}

}  // namespace rwm
