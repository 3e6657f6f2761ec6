#include "rwm/rng.hpp"

#include <cctype>
#include <cstring>
#include <stdexcept>

#include "rwm/crypto.hpp"

namespace rwm {

Rng::Rng(const Seed& seed) : key_(seed) { ensure_sodium(); }

Rng Rng::from_u64(std::uint64_t seed) {
  Seed s{};
  for (int i = 0; i < 8; ++i) s[i] = static_cast<std::uint8_t>(seed >> (8 * i));
  s[31] = 0x5a;
  return Rng(s);
}

Rng Rng::from_hex(std::string_view hex) {
  std::vector<std::uint8_t> raw;
  if (hex.size() % 2 != 0) throw std::invalid_argument("hex seed must have an even number of digits");
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    auto nibble = [](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      throw std::invalid_argument("invalid hex digit in seed");
    };
    raw.push_back(static_cast<std::uint8_t>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
  }
  Seed s{};
  if (raw.size() == s.size()) {
    std::memcpy(s.data(), raw.data(), s.size());
  } else {
    s = Sha256().update("rwm.seed.v1").update(raw).finish();
  }
  return Rng(s);
}

Rng Rng::from_entropy() {
  ensure_sodium();
  Seed s{};
  randombytes_buf(s.data(), s.size());
  return Rng(s);
}

void Rng::refill() {
  static const std::array<std::uint8_t, 1024> kZeros{};
  // 32-bit block counter per nonce; the high half of block_counter_ selects the nonce.
  std::uint8_t nonce[crypto_stream_chacha20_ietf_NONCEBYTES] = {};
  const auto high = static_cast<std::uint32_t>(block_counter_ >> 32);
  std::memcpy(nonce, &high, sizeof(high));
  crypto_stream_chacha20_ietf_xor_ic(buffer_.data(), kZeros.data(), buffer_.size(), nonce,
                                     static_cast<std::uint32_t>(block_counter_), key_.data());
  block_counter_ += buffer_.size() / 64;
  pos_ = 0;
}

Rng::result_type Rng::operator()() {
  if (pos_ + 8 > buffer_.size()) refill();
  std::uint64_t v = 0;
  std::memcpy(&v, buffer_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

void Rng::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (pos_ >= buffer_.size()) refill();
    b = buffer_[pos_++];
  }
}

Seed Rng::seed_bytes() {
  Seed s{};
  fill(s);
  return s;
}

double Rng::uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

bool Rng::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform01() < p;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below bound must be positive");
  const std::uint64_t limit = max() - max() % bound;
  for (;;) {
    const auto v = (*this)();
    if (v < limit) return v % bound;
  }
}

BitString Rng::bits(std::size_t length) {
  BitString out;
  std::size_t done = 0;
  while (done < length) {
    const std::size_t take = std::min<std::size_t>(64, length - done);
    out.append_word((*this)(), take);
    done += take;
  }
  return out;
}

Rng Rng::split() { return Rng(seed_bytes()); }

}  // namespace rwm
