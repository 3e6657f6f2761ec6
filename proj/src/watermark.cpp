#include "rwm/watermark.hpp"

#include <bit>
#include <map>
#include <set>
#include <unordered_map>

namespace rwm {

namespace {

std::size_t prefix_width(std::size_t capacity) { return static_cast<std::size_t>(std::bit_width(capacity)); }

bool contains_at(const BitString& hay, std::size_t pos, const BitString& needle) {
  for (std::size_t done = 0; done < needle.size(); done += 64) {
    const std::size_t take = std::min<std::size_t>(64, needle.size() - done);
    if (hay.extract_unchecked(pos + done, take) != needle.extract_unchecked(done, take)) return false;
  }
  return true;
}

std::optional<std::size_t> find_pattern(const BitString& hay, const BitString& needle) {
  if (needle.empty()) return 0;
  if (needle.size() > hay.size()) return std::nullopt;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    if (contains_at(hay, i, needle)) return i;
  }
  return std::nullopt;
}

// Appends y_t and reports whether a configured DONE marker ended generation.
bool append_block(BitString& out, BitString block, const GenerateOptions& options) {
  if (options.done_marker) {
    if (const auto at = find_pattern(block, *options.done_marker)) {
      block.resize(*at);
      out.append(block);
      return true;
    }
  }
  out.append(block);
  return false;
}

// Lazily evaluates the (message block, signature block) pair at each offset
// and keeps the recovered message for pairs that verify.
class PairScanner {
 public:
  PairScanner(const VerificationKey& vk, const BitString& zeta)
      : vk_(vk), zeta_(zeta), n_(vk.n()), count_(zeta.size() >= 2 * n_ ? zeta.size() - 2 * n_ + 1 : 0),
        status_(count_, kUnknown) {}

  std::size_t count() const { return count_; }
  std::size_t evaluated() const { return evaluated_; }

  bool ok(std::size_t i) {
    if (status_[i] == kUnknown) {
      ++evaluated_;
      status_[i] = kFail;
      if (const auto sigma = decode_frame(vk_, zeta_, i + n_)) {
        if (auto y = rds_recover(vk_.rds, zeta_.slice(i, n_), *sigma)) {
          status_[i] = kOk;
          recovered_.emplace(i, std::move(*y));
        }
      }
    }
    return status_[i] == kOk;
  }

  const BitString& recovered(std::size_t i) const { return recovered_.at(i); }

  bool chain_ok(std::size_t i, std::size_t r) {
    for (std::size_t j = 0; j + 1 < r; ++j) {
      if (!ok(i + j * n_)) return false;
    }
    return true;
  }

 private:
  static constexpr std::int8_t kUnknown = -1;
  static constexpr std::int8_t kFail = 0;
  static constexpr std::int8_t kOk = 1;

  const VerificationKey& vk_;
  const BitString& zeta_;
  std::size_t n_;
  std::size_t count_;
  std::vector<std::int8_t> status_;
  std::unordered_map<std::size_t, BitString> recovered_;
  std::size_t evaluated_ = 0;
};

}  // namespace

const std::vector<Preset>& shipped_presets() {
  static const std::vector<Preset> presets = {
      {"desk-default", 32768, 8, 8, 4, SignerScheme::ed25519, 64, 256},
      {"ci-small", 4096, 8, 2, 3, SignerScheme::hmac_sha256, 64, 64},
      {"unit-tiny", 512, 4, 2, 1, SignerScheme::hmac_sha256, 64, 32},
  };
  return presets;
}

Preset preset_by_name(const std::string& name) {
  for (const auto& p : shipped_presets()) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

PresetReport describe_preset(const Preset& preset) {
  PresetReport rep;
  rep.preset = preset;
  const StegKey steg(Seed{}, preset.steg_params());
  const BchCode code(preset.n, preset.r_sketch);
  rep.capacity_k = steg.capacity_k();
  rep.syndrome_bits = code.redundancy();
  rep.digest_bits = preset.digest_bits;
  rep.sketch_bits = rep.syndrome_bits + rep.digest_bits;
  rep.signature_bits = preset.scheme == SignerScheme::ed25519 ? 512 : preset.mac_bits;
  rep.sigma_bits = rep.sketch_bits + rep.signature_bits;
  rep.prefix_bits = prefix_width(rep.capacity_k);
  rep.frame_bits = rep.prefix_bits + rep.sigma_bits;
  rep.capacity_slack = static_cast<std::int64_t>(rep.capacity_k) - static_cast<std::int64_t>(rep.frame_bits);
  rep.lower_bound_bits = sketch_size_lower_bound(preset.n, preset.r_sketch);
  rep.lower_bound_ok = static_cast<double>(rep.sketch_bits) >= rep.lower_bound_bits;
  rep.feasible = rep.capacity_slack >= 0;
  rep.rds_delta = Fraction(preset.r_sketch, preset.n);
  rep.steg_delta = steg.delta();
  return rep;
}

std::size_t VerificationKey::frame_prefix_bits() const { return prefix_width(steg.capacity_k()); }

namespace {

void check_capacity(const Preset& preset, const StegKey& steg, const RdsPublicKey& rds) {
  const std::size_t need = prefix_width(steg.capacity_k()) + rds.signature_bits();
  if (need > steg.capacity_k()) {
    throw PresetInfeasible("preset '" + preset.name + "' cannot embed its signature: frame needs " +
                           std::to_string(need) + " bits but capacity is " + std::to_string(steg.capacity_k()));
  }
}

}  // namespace

WatermarkKeySet wm_gen(const Preset& preset, Rng& rng) {
  const auto rep = describe_preset(preset);
  if (!rep.feasible) {
    throw PresetInfeasible("preset '" + preset.name + "' cannot embed its signature: frame needs " +
                           std::to_string(rep.frame_bits) + " bits but capacity is " +
                           std::to_string(rep.capacity_k));
  }
  StegKey steg = steg_gen(preset.steg_params(), rng);
  RdsKeypair rds = rds_gen(preset.rds_params(), rng);
  check_capacity(preset, steg, rds.pk);
  return WatermarkKeySet{preset, std::move(steg), std::move(rds)};
}

WatermarkKeySet wm_keyset_from_parts(const Preset& preset, const Seed& steg_seed, const Digest& crhf_key,
                                     std::span<const std::uint8_t> dss_secret) {
  StegKey steg(steg_seed, preset.steg_params());
  SharpSketchKey sk(std::make_shared<const BchCode>(preset.n, preset.r_sketch), crhf_key, preset.r_sketch,
                    preset.digest_bits);
  SignerKeypair dss = dss_from_secret(preset.scheme, dss_secret, preset.mac_bits);
  RdsKeypair rds{RdsPublicKey{std::move(sk), dss.public_part}, std::move(dss)};
  check_capacity(preset, steg, rds.pk);
  return WatermarkKeySet{preset, std::move(steg), std::move(rds)};
}

VerificationKey wm_verification_key_from_parts(const Preset& preset, const Seed& steg_seed, const Digest& crhf_key,
                                               const SignerPublic& dss_public) {
  if (dss_public.scheme != preset.scheme) throw std::invalid_argument("signer scheme does not match preset");
  StegKey steg(steg_seed, preset.steg_params());
  SharpSketchKey sk(std::make_shared<const BchCode>(preset.n, preset.r_sketch), crhf_key, preset.r_sketch,
                    preset.digest_bits);
  RdsPublicKey rds{std::move(sk), dss_public};
  check_capacity(preset, steg, rds);
  return VerificationKey{preset, std::move(steg), std::move(rds)};
}

BitString encode_frame(const VerificationKey& vk, const RobustSignature& sigma) {
  const std::size_t capacity = vk.steg.capacity_k();
  const BitString packed = pack_signature(sigma);
  if (packed.size() != vk.rds.signature_bits()) throw std::invalid_argument("signature width does not match key");
  BitString frame = BitString::from_word(packed.size(), vk.frame_prefix_bits());
  frame.append(packed);
  if (frame.size() > capacity) throw PresetInfeasible("signature frame exceeds steg capacity");
  frame.resize(capacity);
  return frame;
}

std::optional<RobustSignature> decode_frame(const VerificationKey& vk, const BitString& source, std::size_t pos) {
  const StegWindow window(vk.steg, source, pos);
  const std::size_t w = vk.frame_prefix_bits();
  const std::size_t sigma_bits = vk.rds.signature_bits();
  // Cheap rejection on the length prefix before decoding the whole block.
  if (window.message_prefix(w) != static_cast<std::int64_t>(sigma_bits)) return std::nullopt;
  const auto message = window.decode();
  if (!message) return std::nullopt;
  for (std::size_t i = w + sigma_bits; i < message->size(); ++i) {
    if (message->test(i)) return std::nullopt;
  }
  return unpack_signature(vk.rds, message->slice(w, sigma_bits));
}

BitString wm_generate(const WatermarkKeySet& keys, const LanguageModel& model, const BitString& prompt,
                      std::size_t num_blocks, Rng& rng, const GenerateOptions& options) {
  if (num_blocks == 0) throw std::invalid_argument("num_blocks must be at least 1");
  const auto vk = keys.verification_key();
  BitString context = prompt;
  BitString out;
  BitString message = rng.bits(keys.steg.capacity_k());
  for (std::size_t t = 0; t < num_blocks; ++t) {
    auto embedded = steg_embed(keys.steg, model, context, message, rng, options.embed);
    context.append(embedded.block);
    if (t + 1 < num_blocks) message = encode_frame(vk, rds_sign(keys.rds, embedded.block));
    if (append_block(out, std::move(embedded.block), options)) break;
  }
  return out;
}

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::none:
      return "none";
    case RejectReason::too_short:
      return "TooShort";
    case RejectReason::no_window:
      return "NoWindow";
  }
  return "unknown";
}

VerificationReport wm_verify(const VerificationKey& vk, const BitString& zeta, const VerifyOptions& options) {
  return wm_verify_chain(vk, zeta, 2, options);
}

VerificationReport wm_verify_chain(const VerificationKey& vk, const BitString& zeta, std::size_t r,
                                   const VerifyOptions& options) {
  if (r < 2) throw std::invalid_argument("chain length must be at least 2");
  if (options.stride == 0) throw std::invalid_argument("stride must be positive");
  VerificationReport rep;
  rep.chain_length_r = r;
  const std::size_t n = vk.n();
  if (zeta.size() < r * n) {
    rep.reason = RejectReason::too_short;
    return rep;
  }
  PairScanner pairs(vk, zeta);
  for (std::size_t i = 0; i + r * n <= zeta.size(); i += options.stride) {
    ++rep.windows_scanned;
    if (pairs.chain_ok(i, r)) {
      rep.accepted = true;
      rep.matched_offset = i;
      return rep;
    }
  }
  rep.reason = RejectReason::no_window;
  return rep;
}

RecoveryList wm_recover(const VerificationKey& vk, const BitString& zeta) {
  RecoveryList list;
  const std::size_t n = vk.n();
  if (zeta.size() < 2 * n) return list;
  PairScanner pairs(vk, zeta);
  std::set<std::pair<std::size_t, std::vector<std::uint8_t>>> seen;
  for (std::size_t r = 2; r <= zeta.size() / n; ++r) {
    for (std::size_t i = 0; i + r * n <= zeta.size(); ++i) {
      if (!pairs.chain_ok(i, r)) continue;
      BitString xi;
      for (std::size_t j = 0; j + 1 < r; ++j) xi.append(pairs.recovered(i + j * n));
      if (xi.size() != (r - 1) * n) continue;
      if (!seen.emplace(xi.size(), xi.to_bytes()).second) continue;
      list.entries.push_back(RecoveredEntry{std::move(xi), i, r});
    }
  }
  return list;
}

BitString wm_generate_baseline(const WatermarkKeySet& keys, const LanguageModel& model, const BitString& prompt,
                               std::size_t num_blocks, Rng& rng, const GenerateOptions& options) {
  if (num_blocks == 0) throw std::invalid_argument("num_blocks must be at least 1");
  BitString one(keys.steg.capacity_k());
  one.set(0, true);
  BitString context = prompt;
  BitString out;
  for (std::size_t t = 0; t < num_blocks; ++t) {
    auto embedded = steg_embed(keys.steg, model, context, one, rng, options.embed);
    context.append(embedded.block);
    if (append_block(out, std::move(embedded.block), options)) break;
  }
  return out;
}

bool wm_verify_baseline(const VerificationKey& vk, const BitString& zeta) {
  const std::size_t n = vk.n();
  for (std::size_t i = 0; i + n <= zeta.size(); ++i) {
    if (steg_dec_at(vk.steg, zeta, i)) return true;
  }
  return false;
}

}  // namespace rwm
