#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwm/bits.hpp"
#include "rwm/lm.hpp"
#include "rwm/rds.hpp"
#include "rwm/steg.hpp"

namespace rwm {

class PresetInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Preset {
  std::string name;
  std::size_t n = 0;
  std::size_t ell = 0;
  std::size_t r_sketch = 0;
  std::size_t repetition = 1;
  SignerScheme scheme = SignerScheme::ed25519;
  std::size_t mac_bits = 64;
  std::size_t digest_bits = 256;

  StegParams steg_params() const { return {n, ell, repetition}; }
  RdsParams rds_params() const { return {n, r_sketch, digest_bits, scheme, mac_bits}; }
};

/// desk-default, ci-small, unit-tiny.
const std::vector<Preset>& shipped_presets();
/// Throws std::invalid_argument for unknown names.
Preset preset_by_name(const std::string& name);

struct PresetReport {
  Preset preset;
  std::size_t capacity_k = 0;
  std::size_t syndrome_bits = 0;
  std::size_t digest_bits = 0;
  std::size_t sketch_bits = 0;
  std::size_t signature_bits = 0;  // inner signer
  std::size_t sigma_bits = 0;      // sketch + signature
  std::size_t prefix_bits = 0;
  std::size_t frame_bits = 0;      // prefix + sigma
  std::int64_t capacity_slack = 0;
  double lower_bound_bits = 0.0;
  bool lower_bound_ok = false;
  bool feasible = false;
  Fraction rds_delta;   // r / n
  Fraction steg_delta;  // payload code radius / (n/ell - 1)
};

/// Instantiates the preset's codes (no key material) and checks capacity.
PresetReport describe_preset(const Preset& preset);

struct VerificationKey {
  Preset preset;
  StegKey steg;
  RdsPublicKey rds;

  std::size_t n() const { return preset.n; }
  std::size_t frame_prefix_bits() const;
};

struct WatermarkKeySet {
  Preset preset;
  StegKey steg;
  RdsKeypair rds;

  VerificationKey verification_key() const { return VerificationKey{preset, steg, rds.pk}; }
};

/// Throws PresetInfeasible when |frame(sigma)| exceeds the steg capacity.
WatermarkKeySet wm_gen(const Preset& preset, Rng& rng);
/// Rebuilds a keyset from stored material.
WatermarkKeySet wm_keyset_from_parts(const Preset& preset, const Seed& steg_seed, const Digest& crhf_key,
                                     std::span<const std::uint8_t> dss_secret);
VerificationKey wm_verification_key_from_parts(const Preset& preset, const Seed& steg_seed, const Digest& crhf_key,
                                               const SignerPublic& dss_public);

/// Fixed-width steg payload: length prefix, packed sigma, zero padding.
BitString encode_frame(const VerificationKey& vk, const RobustSignature& sigma);
std::optional<RobustSignature> decode_frame(const VerificationKey& vk, const BitString& source, std::size_t pos);

struct GenerateOptions {
  EmbedOptions embed;
  /// When set, generation stops at the first block containing this pattern
  /// and that block is cut just before it. Off by default.
  std::optional<BitString> done_marker;
};

BitString wm_generate(const WatermarkKeySet& keys, const LanguageModel& model, const BitString& prompt,
                      std::size_t num_blocks, Rng& rng, const GenerateOptions& options = {});

enum class RejectReason { none, too_short, no_window };
const char* to_string(RejectReason reason);

struct VerificationReport {
  bool accepted = false;
  std::optional<std::size_t> matched_offset;
  std::size_t chain_length_r = 2;
  RejectReason reason = RejectReason::none;
  std::size_t windows_scanned = 0;
};

struct VerifyOptions {
  /// 1 scans every bit offset. n gives the block-aligned fast mode.
  std::size_t stride = 1;
};

VerificationReport wm_verify(const VerificationKey& vk, const BitString& zeta, const VerifyOptions& options = {});
VerificationReport wm_verify_chain(const VerificationKey& vk, const BitString& zeta, std::size_t r,
                                   const VerifyOptions& options = {});

struct RecoveredEntry {
  BitString content;
  std::size_t offset = 0;
  std::size_t r = 0;
};

struct RecoveryList {
  std::vector<RecoveredEntry> entries;
  bool empty() const { return entries.empty(); }
};

RecoveryList wm_recover(const VerificationKey& vk, const BitString& zeta);

/// Robustness-only baseline: each block embeds the message 1 (zero padded).
BitString wm_generate_baseline(const WatermarkKeySet& keys, const LanguageModel& model, const BitString& prompt,
                               std::size_t num_blocks, Rng& rng, const GenerateOptions& options = {});
/// Accepts iff some n-bit window decodes to anything other than NoDecode.
bool wm_verify_baseline(const VerificationKey& vk, const BitString& zeta);

}  // namespace rwm
