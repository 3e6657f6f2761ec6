#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rwm {

/// Packed bit string. Bit i lives in word i/64 at position i%64, which
/// matches the little-endian byte packing used on the wire (byte i/8,
/// position i%8). Bits past size() in the last word are always zero.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t length);

  static BitString from_text(std::string_view text);
  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t length);
  static BitString from_word(std::uint64_t value, std::size_t width);

  std::size_t size() const { return length_; }
  bool empty() const { return length_ == 0; }

  /// Checked access; throws std::out_of_range.
  bool get(std::size_t i) const;
  void set(std::size_t i, bool value);
  void flip(std::size_t i);

  /// Unchecked access for hot loops.
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

  void push_back(bool bit);
  void pop_back();
  void resize(std::size_t length);
  void append(const BitString& other);
  /// Appends the low `width` bits of `value`, least significant first.
  void append_word(std::uint64_t value, std::size_t width);

  /// Bits [pos, pos+width) as an integer (bit pos is the LSB). width <= 64.
  std::uint64_t extract(std::size_t pos, std::size_t width) const;
  /// Unchecked variant of extract.
  std::uint64_t extract_unchecked(std::size_t pos, std::size_t width) const;

  BitString slice(std::size_t pos, std::size_t len) const;
  std::size_t popcount() const;

  BitString& operator^=(const BitString& other);
  friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }
  friend bool operator==(const BitString& a, const BitString& b) = default;

  std::vector<std::uint8_t> to_bytes() const;
  std::string to_text() const;
  std::span<const std::uint64_t> words() const { return words_; }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t length_ = 0;
};

BitString concat(std::initializer_list<const BitString*> parts);
std::size_t hamming_distance(const BitString& a, const BitString& b);

/// Distance between a[a_pos, a_pos+len) and b[b_pos, b_pos+len); stops
/// counting once the distance exceeds `limit` and returns limit + 1.
std::size_t hamming_distance_within(const BitString& a, std::size_t a_pos, const BitString& b,
                                    std::size_t b_pos, std::size_t len, std::size_t limit);

/// Non-overlapping n-bit blocks; trailing bits that do not fill a block are
/// not exposed.
class BlockView {
 public:
  BlockView(const BitString& source, std::size_t block_size);
  std::size_t count() const { return count_; }
  std::size_t block_size() const { return block_size_; }
  /// Zero-based block index.
  BitString block(std::size_t t) const;
  std::size_t offset(std::size_t t) const { return t * block_size_; }
  const BitString& source() const { return *source_; }

 private:
  const BitString* source_;
  std::size_t block_size_;
  std::size_t count_;
};

/// Exact non-negative rational in [0, 1].
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  Fraction() = default;
  Fraction(std::uint64_t n, std::uint64_t d);
  /// True iff count <= num/den * total, compared without rounding.
  bool admits(std::uint64_t count, std::uint64_t total) const;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

bool hamming_close(const BitString& y, const BitString& y2, Fraction delta);
bool block_equality_close(const BitString& y, const BitString& y2, Fraction delta, std::size_t ell);

class Predicate {
 public:
  struct Hamming {
    Fraction delta;
  };
  struct BlockEquality {
    Fraction delta;
    std::size_t ell;
  };
  struct EveryBlockClose {
    std::shared_ptr<const Predicate> inner;
    std::size_t n;
  };
  struct Equality {};

  static Predicate hamming(Fraction delta);
  static Predicate block_equality(Fraction delta, std::size_t ell);
  static Predicate every_block_close(Predicate inner, std::size_t n);
  static Predicate equality();

  bool operator()(const BitString& a, const BitString& b) const;
  const auto& kind() const { return kind_; }

 private:
  using Kind = std::variant<Hamming, BlockEquality, EveryBlockClose, Equality>;
  explicit Predicate(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

bool every_block_close(const BitString& zeta_star, const BitString& y, const Predicate& inner,
                       std::size_t n);

// Text codec: "b<length>:<base64 of packed bytes>", or raw '0'/'1' runs.
std::string encode_bitstream(const BitString& bits);
/// Accepts either form; whitespace is ignored. Throws std::invalid_argument.
BitString decode_bitstream(std::string_view text);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace rwm
