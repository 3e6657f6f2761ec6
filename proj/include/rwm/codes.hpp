#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rwm/bits.hpp"
#include "rwm/rng.hpp"

namespace rwm {

enum class CodeFamily : std::uint8_t { bch = 1, dense = 2, repetition = 3 };

const char* to_string(CodeFamily family);

/// Binary linear [n, k] code with a parity-check view (syndromes) and a
/// generator view (payload encode/decode). Immutable after construction.
class LinearCode {
 public:
  virtual ~LinearCode() = default;

  virtual CodeFamily family() const = 0;
  std::size_t length() const { return n_; }
  std::size_t dimension() const { return k_; }
  std::size_t redundancy() const { return n_ - k_; }
  std::size_t min_distance() const { return d_; }
  /// Unique-decoding radius floor((d - 1) / 2).
  std::size_t radius() const { return d_ == 0 ? 0 : (d_ - 1) / 2; }

  /// H * x over GF(2); throws std::invalid_argument unless |x| = n.
  virtual BitString syndrome(const BitString& x) const = 0;

  /// The unique e with weight(e) <= max_weight and H e = s, or nullopt.
  /// Throws std::invalid_argument if max_weight exceeds radius().
  virtual std::optional<BitString> decode_syndrome(const BitString& s, std::size_t max_weight) const = 0;

  virtual BitString encode(const BitString& message) const = 0;
  /// Corrects up to radius() errors; nullopt when no codeword is in range.
  virtual std::optional<BitString> decode(const BitString& word) const;

  /// Rows of H, each of length n.
  virtual std::vector<BitString> parity_check_rows() const = 0;

 protected:
  LinearCode(std::size_t n, std::size_t k, std::size_t d) : n_(n), k_(k), d_(d) {}
  void check_length(const BitString& x) const;
  void check_syndrome(const BitString& s, std::size_t max_weight) const;
  virtual BitString message_of(const BitString& codeword) const = 0;

  std::size_t n_;
  std::size_t k_;
  std::size_t d_;
};

/// Arithmetic in GF(2^m) via log/antilog tables over a primitive polynomial.
class GaloisField {
 public:
  explicit GaloisField(unsigned m);
  unsigned degree() const { return m_; }
  std::uint32_t order() const { return order_; }  // 2^m - 1
  std::uint32_t exp(std::uint64_t e) const { return exp_[e % order_]; }
  std::int64_t log(std::uint32_t a) const { return log_[a]; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t div(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t square(std::uint32_t a) const { return mul(a, a); }

 private:
  unsigned m_;
  std::uint32_t order_;
  std::vector<std::uint32_t> exp_;
  std::vector<std::int64_t> log_;
};

/// Narrow-sense binary BCH code of designed distance 2t + 1, shortened to
/// length n <= 2^m - 1. The syndrome is (S_1, S_3, ..., S_{2t-1}), each an
/// m-bit field element, so n - k = m * t.
class BchCode final : public LinearCode {
 public:
  BchCode(std::size_t n, std::size_t t);
  CodeFamily family() const override { return CodeFamily::bch; }
  std::size_t designed_t() const { return t_; }
  const GaloisField& field() const { return gf_; }

  BitString syndrome(const BitString& x) const override;
  std::optional<BitString> decode_syndrome(const BitString& s, std::size_t max_weight) const override;
  BitString encode(const BitString& message) const override;
  std::vector<BitString> parity_check_rows() const override;

 protected:
  BitString message_of(const BitString& codeword) const override;

 private:
  std::vector<std::uint32_t> field_syndromes(const BitString& s) const;

  std::size_t t_;
  GaloisField gf_;
  BitString generator_;  // coefficients of g(x), degree n - k
};

/// Explicit parity-check matrix for short codes (n <= 24). Decoding uses a
/// syndrome table over every error pattern of weight <= radius.
class DenseCode final : public LinearCode {
 public:
  static constexpr std::size_t kMaxLength = 24;

  explicit DenseCode(std::vector<BitString> rows);
  /// Samples full-rank H until the exact minimum distance reaches min_distance.
  static DenseCode random(std::size_t n, std::size_t redundancy, std::size_t min_distance, Rng& rng);

  CodeFamily family() const override { return CodeFamily::dense; }
  BitString syndrome(const BitString& x) const override;
  std::optional<BitString> decode_syndrome(const BitString& s, std::size_t max_weight) const override;
  BitString encode(const BitString& message) const override;
  std::vector<BitString> parity_check_rows() const override { return rows_; }

  /// Column j of H packed as an integer (row i in bit i).
  std::uint32_t column(std::size_t j) const { return columns_[j]; }

 protected:
  BitString message_of(const BitString& codeword) const override;

 private:
  std::vector<BitString> rows_;
  std::vector<std::uint32_t> columns_;
  std::vector<std::size_t> info_positions_;
  std::vector<std::uint32_t> basis_;  // generator rows as n-bit masks
  std::unordered_map<std::uint32_t, std::uint32_t> table_;
};

/// k message bits, each repeated `copies` times through a stride-k
/// interleaver: code position p < k * copies carries message bit p mod k.
/// Positions past k * copies are fixed to zero. Decoding is a per-bit
/// majority vote and reports nullopt on a tie.
class RepetitionCode final : public LinearCode {
 public:
  RepetitionCode(std::size_t message_bits, std::size_t copies, std::size_t length);
  /// Largest k that fits `length` with the given replication.
  static RepetitionCode fitting(std::size_t length, std::size_t copies);

  CodeFamily family() const override { return CodeFamily::repetition; }
  std::size_t copies() const { return copies_; }
  /// Message bit carried by code position p, or k for unused tail positions.
  std::size_t group_of(std::size_t p) const { return p < k_ * copies_ ? p % k_ : k_; }

  BitString syndrome(const BitString& x) const override;
  std::optional<BitString> decode_syndrome(const BitString& s, std::size_t max_weight) const override;
  BitString encode(const BitString& message) const override;
  std::optional<BitString> decode(const BitString& word) const override;
  std::vector<BitString> parity_check_rows() const override;

  /// Majority vote for message bit j given a code-bit accessor; -1 on a tie.
  template <class BitAt>
  int vote(std::size_t j, BitAt&& bit_at) const {
    std::size_t ones = 0;
    for (std::size_t c = 0; c < copies_; ++c) ones += bit_at(j + c * k_) ? 1 : 0;
    if (2 * ones == copies_) return -1;
    return 2 * ones > copies_ ? 1 : 0;
  }

 protected:
  BitString message_of(const BitString& codeword) const override;

 private:
  std::size_t copies_;
};

/// Versioned blob: magic "RWMH", version, family tag, n, k, d (u32 LE), then
/// the (n - k) x n matrix row-major as one packed bit stream.
std::vector<std::uint8_t> serialize_parity_check(const LinearCode& code);
/// Reconstructs the code and checks the stored matrix against it.
std::unique_ptr<LinearCode> deserialize_parity_check(std::span<const std::uint8_t> blob);

/// Row rank of a binary matrix over GF(2).
std::size_t gf2_rank(std::vector<BitString> rows);

}  // namespace rwm
