#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwm/bits.hpp"
#include "rwm/lm.hpp"
#include "rwm/sketch.hpp"
#include "rwm/watermark.hpp"

namespace rwm {

struct TranscriptEntry {
  BitString prompt;
  BitString response;
};

struct VerifyCall {
  BitString input;
  VerificationReport report;
};

/// Append-only record of generation-oracle and verification calls.
class AttackTranscript {
 public:
  void record_generation(BitString prompt, BitString response);
  void record_verify(BitString input, VerificationReport report);

  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  const std::vector<VerifyCall>& verify_calls() const { return verify_calls_; }
  bool contains_response(const BitString& response) const;

 private:
  std::vector<TranscriptEntry> entries_;
  std::vector<VerifyCall> verify_calls_;
};

/// Generation oracle that logs every query into a transcript.
class RecordedOracle {
 public:
  RecordedOracle(const WatermarkKeySet& keys, const LanguageModel& model, AttackTranscript& transcript)
      : keys_(&keys), model_(&model), transcript_(&transcript) {}
  BitString generate(const BitString& prompt, std::size_t blocks, Rng& rng);
  VerificationReport verify(const BitString& zeta);

 private:
  const WatermarkKeySet* keys_;
  const LanguageModel* model_;
  AttackTranscript* transcript_;
};

enum class AttackKind { flip_per_block, scramble_sub_blocks, splice_into_random, pure_random, cross_response_splice };
enum class ScrambleScope { carrier, all_blocks };

struct AttackSpec {
  AttackKind kind = AttackKind::pure_random;
  std::size_t count = 0;         // flip: bits per block
  bool within_radius = true;     // flip/scramble: keep every repetition group inside its radius
  double fraction = 0.0;         // scramble: share of carrier sub-blocks replaced
  bool preserve_first = true;    // flip/scramble: never touch sub-block 1
  ScrambleScope scope = ScrambleScope::carrier;
  std::size_t padding_bits = 0;  // splice
  std::size_t length = 0;        // random: 0 means 4n
  std::size_t blocks = 2;        // response length in blocks

  /// "flip:8", "flip:8:any", "scramble:0.2:carrier", "scramble:0.5:all[:nofirst]",
  /// "splice:327680", "random:131072", "cross"; an optional ":blocks=B" suffix sets blocks.
  static AttackSpec parse(const std::string& text);
  std::string to_string() const;
};

struct AttackSummary {
  std::string attack;
  std::size_t trials = 0;
  std::size_t accepted = 0;
  std::size_t recovered_any = 0;
  std::size_t recovered_exact = 0;
  std::size_t ebc_close = 0;
  std::size_t planted_offset_hits = 0;
  std::size_t unforgeability_violations = 0;  // accepted although no n-window is close to a response
  std::size_t recovery_violations = 0;        // an entry that is not a contiguous response substring
  std::size_t fidelity_violations = 0;        // a response used by the attack is missing from the transcript
  std::size_t recovered_entries = 0;

  double accept_rate() const { return trials ? static_cast<double>(accepted) / trials : 0.0; }
  double recover_exact_rate() const { return trials ? static_cast<double>(recovered_exact) / trials : 0.0; }
  double recover_any_rate() const { return trials ? static_cast<double>(recovered_any) / trials : 0.0; }
  double ebc_close_rate() const { return trials ? static_cast<double>(ebc_close) / trials : 0.0; }
};

/// Applies the attack to `responses` (the trial's transcript responses) and
/// returns the adversary's output. `planted` receives the offset of the
/// original response when the attack keeps it contiguous.
BitString apply_attack(const AttackSpec& spec, const WatermarkKeySet& keys, const std::vector<BitString>& responses,
                       Rng& rng, std::optional<std::size_t>* planted = nullptr);

AttackSummary run_attack(const WatermarkKeySet& keys, const LanguageModel& model, const AttackSpec& spec,
                         std::size_t trials, Rng& rng);

/// True iff some n-bit window of zeta is Ham_{r/n}-close to some block of some response.
bool ebc_close_to_transcript(const VerificationKey& vk, const BitString& zeta, const AttackTranscript& transcript);
/// True iff `needle` occurs as a contiguous substring of `hay`.
bool is_substring(const BitString& needle, const BitString& hay);

class AmbiguityDetected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive search over every x_hat within distance r of x_prime using the
/// explicit parity-check columns. Needs redundancy <= 64.
class BruteForceSketchOracle {
 public:
  explicit BruteForceSketchOracle(const SharpSketchKey& key);
  std::optional<BitString> operator()(const Sketch& z, const BitString& x_prime, std::size_t r) const;

 private:
  const SharpSketchKey* key_;
  std::vector<std::uint64_t> columns_;
  std::unordered_multimap<std::uint64_t, std::size_t> by_column_;
};

std::optional<BitString> brute_force_sketch_oracle(const SharpSketchKey& key, const Sketch& z,
                                                   const BitString& x_prime, std::size_t r);

struct UndetectabilityReport {
  std::size_t bits = 0;
  std::size_t ones = 0;
  double chi_square = 0.0;
  double chi_square_p = 0.0;
  double autocorr = 0.0;
  double autocorr_sigma = 0.0;
  bool passed() const { return chi_square_p > 0.001 && std::abs(autocorr) < 3.0 * autocorr_sigma; }
};

/// Bit-marginal chi-square and lag-1 autocorrelation of `samples` watermarked bits.
UndetectabilityReport undetectability_test(const WatermarkKeySet& keys, const LanguageModel& model,
                                           std::size_t samples, Rng& rng);
UndetectabilityReport bit_statistics(const BitString& bits);

std::string summary_to_kv(const AttackSummary& s);
std::string summary_to_json(const AttackSummary& s);
std::string undetectability_to_kv(const UndetectabilityReport& r);

}  // namespace rwm
