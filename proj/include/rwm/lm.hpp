#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rwm/bits.hpp"
#include "rwm/rng.hpp"

namespace rwm {

/// Toy next-bit model Q: context -> probability that the next bit is 1.
///
/// Model spec (JSON):
///   {"kind": "uniform"}
///   {"kind": "biased", "p": 0.7}
///   {"kind": "markov", "order": k, "table": [q_0, ..., q_{2^k - 1}]}
/// For markov, the table index is the last k context bits read oldest-first
/// as a binary number (most significant = oldest); shorter contexts are
/// left-padded with zeros.
class LanguageModel {
 public:
  enum class Kind { uniform, biased, markov };
  static constexpr std::size_t kMaxOrder = 20;

  static LanguageModel uniform();
  static LanguageModel biased(double p);
  static LanguageModel markov(std::size_t order, std::vector<double> table);
  static LanguageModel from_json(std::string_view text);
  std::string to_json() const;

  Kind kind() const { return kind_; }
  std::size_t order() const { return order_; }
  double p() const { return p_; }
  const std::vector<double>& table() const { return table_; }

  double next_bit_prob(const BitString& context) const;
  /// Markov state of `context` (0 for memoryless models).
  std::uint64_t state_of(const BitString& context) const;
  double prob_at_state(std::uint64_t state) const { return kind_ == Kind::markov ? table_[state] : p_; }
  std::uint64_t advance(std::uint64_t state, bool bit) const {
    return kind_ == Kind::markov ? ((state << 1) | (bit ? 1U : 0U)) & mask_ : 0;
  }

  /// Worst-case min-entropy, in bits, of an ell-bit response over all contexts.
  double min_entropy_per_block(std::size_t ell) const;

 private:
  LanguageModel(Kind kind, double p, std::size_t order, std::vector<double> table);

  Kind kind_;
  double p_;
  std::size_t order_;
  std::uint64_t mask_;
  std::vector<double> table_;
};

/// Autoregressive sampling session over a growing context.
class SamplerState {
 public:
  SamplerState(const LanguageModel& model, Rng& rng, BitString context);

  /// Draws ell bits from the current context without committing them.
  BitString propose(std::size_t ell);
  /// Appends bits to the context.
  void accept(const BitString& bits);
  const BitString& context() const { return context_; }

 private:
  const LanguageModel* model_;
  Rng* rng_;
  BitString context_;
  std::uint64_t state_;
};

BitString response(const LanguageModel& model, const BitString& prompt, std::size_t ell, Rng& rng);

}  // namespace rwm
