#include "rwm/signer.hpp"

#include <sodium.h>

#include <stdexcept>

#include "rwm/crypto.hpp"

namespace rwm {

namespace {

// Every signed byte string is "rwm.dss.v1" ‖ context ‖ message, each framed
// with its length.
std::vector<std::uint8_t> framed(std::string_view context, const BitString& message) {
  std::vector<std::uint8_t> out;
  auto put = [&](std::span<const std::uint8_t> bytes) {
    const std::uint64_t len = bytes.size();
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
    out.insert(out.end(), bytes.begin(), bytes.end());
  };
  constexpr std::string_view kPrefix = "rwm.dss.v1";
  put({reinterpret_cast<const std::uint8_t*>(kPrefix.data()), kPrefix.size()});
  put({reinterpret_cast<const std::uint8_t*>(context.data()), context.size()});
  const std::uint64_t bits = message.size();
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  const auto packed = message.to_bytes();
  out.insert(out.end(), packed.begin(), packed.end());
  return out;
}

void check_mac_bits(std::size_t mac_bits) {
  if (mac_bits < 64 || mac_bits > 128) throw std::invalid_argument("MAC signer length must be in [64, 128] bits");
}

}  // namespace

const char* to_string(SignerScheme scheme) {
  switch (scheme) {
    case SignerScheme::ed25519:
      return "ed25519";
    case SignerScheme::hmac_sha256:
      return "hmac-sha256";
  }
  return "unknown";
}

SignerScheme signer_scheme_from_string(std::string_view name) {
  if (name == "ed25519") return SignerScheme::ed25519;
  if (name == "hmac-sha256" || name == "hmac") return SignerScheme::hmac_sha256;
  throw std::invalid_argument("unknown signer scheme: " + std::string(name));
}

SignerKeypair dss_from_secret(SignerScheme scheme, std::span<const std::uint8_t> secret, std::size_t mac_bits) {
  ensure_sodium();
  SignerKeypair kp;
  kp.public_part.scheme = scheme;
  switch (scheme) {
    case SignerScheme::ed25519: {
      if (secret.size() != crypto_sign_SEEDBYTES) throw std::invalid_argument("Ed25519 seed must be 32 bytes");
      std::vector<std::uint8_t> pk(crypto_sign_PUBLICKEYBYTES);
      std::vector<std::uint8_t> sk(crypto_sign_SECRETKEYBYTES);
      crypto_sign_seed_keypair(pk.data(), sk.data(), secret.data());
      kp.public_part.key = std::move(pk);
      kp.public_part.sig_len = crypto_sign_BYTES * 8;
      kp.secret_part = std::move(sk);
      return kp;
    }
    case SignerScheme::hmac_sha256: {
      check_mac_bits(mac_bits);
      if (secret.size() != 32) throw std::invalid_argument("MAC key must be 32 bytes");
      kp.public_part.key.assign(secret.begin(), secret.end());
      kp.public_part.sig_len = mac_bits;
      kp.secret_part.assign(secret.begin(), secret.end());
      return kp;
    }
  }
  throw std::invalid_argument("unknown signer scheme");
}

SignerKeypair dss_gen(SignerScheme scheme, Rng& rng, std::size_t mac_bits) {
  const Seed seed = rng.seed_bytes();
  return dss_from_secret(scheme, seed, mac_bits);
}

BitString dss_sign(const SignerKeypair& kp, const BitString& message, std::string_view context) {
  const auto bytes = framed(context, message);
  switch (kp.scheme()) {
    case SignerScheme::ed25519: {
      if (kp.secret_part.size() != crypto_sign_SECRETKEYBYTES) throw std::invalid_argument("bad Ed25519 secret key");
      std::uint8_t sig[crypto_sign_BYTES];
      crypto_sign_detached(sig, nullptr, bytes.data(), bytes.size(), kp.secret_part.data());
      return BitString::from_bytes(sig, crypto_sign_BYTES * 8);
    }
    case SignerScheme::hmac_sha256: {
      const auto tag = hmac_sha256(kp.secret_part, bytes);
      return digest_prefix(tag, kp.sig_len());
    }
  }
  throw std::invalid_argument("unknown signer scheme");
}

bool dss_verify(const SignerPublic& pk, const BitString& message, const BitString& signature,
                std::string_view context) {
  if (signature.size() != pk.sig_len) return false;
  const auto bytes = framed(context, message);
  switch (pk.scheme) {
    case SignerScheme::ed25519: {
      if (pk.key.size() != crypto_sign_PUBLICKEYBYTES) return false;
      const auto sig = signature.to_bytes();
      return crypto_sign_verify_detached(sig.data(), bytes.data(), bytes.size(), pk.key.data()) == 0;
    }
    case SignerScheme::hmac_sha256: {
      if (pk.key.size() != 32) return false;
      const auto expect = digest_prefix(hmac_sha256(pk.key, bytes), pk.sig_len).to_bytes();
      const auto got = signature.to_bytes();
      return expect.size() == got.size() && sodium_memcmp(expect.data(), got.data(), got.size()) == 0;
    }
  }
  return false;
}

}  // namespace rwm
