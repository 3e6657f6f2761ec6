#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rwm/bits.hpp"
#include "rwm/signer.hpp"
#include "rwm/sketch.hpp"

namespace rwm {

struct RdsParams {
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t digest_bits = 256;
  SignerScheme scheme = SignerScheme::ed25519;
  std::size_t mac_bits = 64;
};

struct RdsPublicKey {
  SharpSketchKey sketch_key;
  SignerPublic dss;

  std::size_t n() const { return sketch_key.n(); }
  std::size_t r() const { return sketch_key.r(); }
  /// Exact |sigma| = sketch bits + signature bits.
  std::size_t signature_bits() const { return sketch_key.sketch_bits() + dss.sig_len; }
  /// The closeness predicate Ham_{r/n} tolerated by verification.
  Predicate predicate() const { return Predicate::hamming(Fraction(r(), n())); }
};

struct RdsKeypair {
  RdsPublicKey pk;
  SignerKeypair dss;
};

struct RobustSignature {
  Sketch z;
  BitString tau;

  std::size_t bit_size() const { return z.bit_size() + tau.size(); }
  friend bool operator==(const RobustSignature&, const RobustSignature&) = default;
};

inline constexpr std::string_view kRdsSignContext = "rwm.rds.sketch.v1";

RdsKeypair rds_gen(const RdsParams& params, Rng& rng);
RobustSignature rds_sign(const RdsKeypair& kp, const BitString& y);
bool rds_verify(const RdsPublicKey& pk, const BitString& zeta, const RobustSignature& sigma);
std::optional<BitString> rds_recover(const RdsPublicKey& pk, const BitString& zeta, const RobustSignature& sigma);

/// Versioned blob: version byte, u32-length-prefixed sketch blob, u32-length-prefixed tau bits.
std::vector<std::uint8_t> serialize_signature(const RobustSignature& sigma);
RobustSignature deserialize_signature(std::span<const std::uint8_t> blob);

/// Fixed-width packing (syndrome ‖ digest ‖ tau) used as the steganographic payload.
BitString pack_signature(const RobustSignature& sigma);
/// Inverse of pack_signature; nullopt when the width does not match pk.
std::optional<RobustSignature> unpack_signature(const RdsPublicKey& pk, const BitString& bits);

}  // namespace rwm
