#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rwm/bits.hpp"
#include "rwm/rng.hpp"

namespace rwm {

enum class SignerScheme : std::uint8_t {
  ed25519 = 1,
  // Truncated HMAC-SHA256. The verification key is the MAC key itself, so it
  // is only meaningful where the verifier is trusted.
  hmac_sha256 = 2,
};

const char* to_string(SignerScheme scheme);
SignerScheme signer_scheme_from_string(std::string_view name);

struct SignerPublic {
  SignerScheme scheme = SignerScheme::ed25519;
  std::vector<std::uint8_t> key;
  std::size_t sig_len = 0;  // bits

  bool publicly_verifiable() const { return scheme == SignerScheme::ed25519; }
  friend bool operator==(const SignerPublic&, const SignerPublic&) = default;
};

struct SignerKeypair {
  SignerPublic public_part;
  std::vector<std::uint8_t> secret_part;

  SignerScheme scheme() const { return public_part.scheme; }
  std::size_t sig_len() const { return public_part.sig_len; }
};

inline constexpr std::string_view kDefaultSignContext = "rwm.dss.default";

/// mac_bits selects the truncation of the HMAC backend (64..128) and is
/// ignored for Ed25519, whose signatures are always 512 bits.
SignerKeypair dss_gen(SignerScheme scheme, Rng& rng, std::size_t mac_bits = 64);
/// Rebuilds a keypair from its secret part alone.
SignerKeypair dss_from_secret(SignerScheme scheme, std::span<const std::uint8_t> secret, std::size_t mac_bits);

BitString dss_sign(const SignerKeypair& kp, const BitString& message,
                   std::string_view context = kDefaultSignContext);
bool dss_verify(const SignerPublic& pk, const BitString& message, const BitString& signature,
                std::string_view context = kDefaultSignContext);

}  // namespace rwm
