#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwm/bits.hpp"
#include "rwm/codes.hpp"
#include "rwm/lm.hpp"
#include "rwm/rng.hpp"

namespace rwm {

class EmbedFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StegParams {
  std::size_t n = 0;
  std::size_t ell = 0;
  std::size_t repetition = 1;
};

struct StegTags {
  std::string h1 = "rwm.steg.h1.v1";
  std::string h2 = "rwm.steg.h2.v1";
};

/// Key and geometry of the random-oracle block steganography. A block is
/// n/ell sub-blocks; the first seeds the pad H2(r, y_1) and every later
/// sub-block carries one code bit through H1(r, y_i).
class StegKey {
 public:
  static constexpr std::size_t kMaxEll = 64;
  static constexpr std::size_t kTableEll = 12;

  StegKey(const Seed& r, const StegParams& params, StegTags tags = {});

  const Seed& seed() const { return r_; }
  const StegParams& params() const { return params_; }
  std::size_t n() const { return params_.n; }
  std::size_t ell() const { return params_.ell; }
  std::size_t sub_blocks() const { return params_.n / params_.ell; }
  std::size_t code_length() const { return sub_blocks() - 1; }
  const RepetitionCode& payload_code() const { return *code_; }
  std::size_t capacity_k() const { return code_->dimension(); }
  const StegTags& tags() const { return tags_; }

  /// Largest fraction of later sub-blocks that may be corrupted arbitrarily
  /// while decoding is still guaranteed: radius / (n/ell - 1).
  Fraction delta() const { return Fraction(code_->radius(), code_length()); }

  bool h1(std::uint64_t sub_block) const;
  /// Pad of code_length() bits.
  BitString h2(std::uint64_t first_sub_block) const;
  /// Precomputed pad, or nullptr when ell is too large for tables.
  const BitString* h2_table_entry(std::uint64_t first_sub_block) const;

 private:
  bool h1_uncached(std::uint64_t v) const;
  BitString h2_uncached(std::uint64_t v) const;

  Seed r_;
  StegParams params_;
  StegTags tags_;
  std::shared_ptr<const RepetitionCode> code_;
  std::vector<std::uint8_t> h1_table_;
  std::vector<BitString> h2_table_;
};

StegKey steg_gen(const StegParams& params, Rng& rng);

struct EmbedOptions {
  /// Minimum per-sub-block min-entropy (bits) the model must certify.
  double entropy_floor = 1.0;
  /// 0 selects 64 * 2^(ell - min_entropy), with the exponent clamped to [0, 20].
  std::uint64_t retry_cap = 0;
};

struct EmbedResult {
  BitString block;
  std::vector<std::uint32_t> attempts;  // per carrier sub-block
};

std::uint64_t default_retry_cap(const StegKey& key, const LanguageModel& model);

EmbedResult steg_embed(const StegKey& key, const LanguageModel& model, const BitString& context,
                       const BitString& message, Rng& rng, const EmbedOptions& options = {});

std::optional<BitString> steg_dec(const StegKey& key, const BitString& zeta);
/// Decodes the n-bit window of `source` starting at bit `pos`.
std::optional<BitString> steg_dec_at(const StegKey& key, const BitString& source, std::size_t pos);

/// Lazy per-window decoder: individual message bits can be voted without
/// decoding the whole block.
class StegWindow {
 public:
  StegWindow(const StegKey& key, const BitString& source, std::size_t pos);
  /// Majority vote for message bit j; -1 on a tie.
  int message_bit(std::size_t j) const;
  /// The first `width` message bits as an integer (bit 0 least significant), or -1 if any tie.
  std::int64_t message_prefix(std::size_t width) const;
  std::optional<BitString> decode() const;

 private:
  bool code_bit(std::size_t p) const;

  const StegKey* key_;
  const BitString* source_;
  std::size_t pos_;
  const BitString* pad_;
  BitString owned_pad_;
};

}  // namespace rwm
