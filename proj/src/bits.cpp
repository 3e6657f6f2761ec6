#include "rwm/bits.hpp"

#include <sodium.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <stdexcept>

namespace rwm {

namespace {

constexpr std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

std::uint64_t low_mask(std::size_t width) {
  return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

}  // namespace

BitString::BitString(std::size_t length) : words_(words_for(length), 0), length_(length) {}

BitString BitString::from_text(std::string_view text) {
  BitString out;
  for (char c : text) {
    if (c == '0' || c == '1') {
      out.push_back(c == '1');
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("bit text may only contain '0', '1' and whitespace");
    }
  }
  return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes, std::size_t length) {
  if (bytes.size() != (length + 7) / 8) {
    throw std::invalid_argument("byte count does not match bit length");
  }
  BitString out(length);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    out.words_[i / 8] |= std::uint64_t{bytes[i]} << (8 * (i % 8));
  }
  if (length % 64 != 0 && !out.words_.empty()) {
    if (out.words_.back() & ~low_mask(length % 64)) {
      throw std::invalid_argument("nonzero padding bits in packed bit string");
    }
  }
  return out;
}

BitString BitString::from_word(std::uint64_t value, std::size_t width) {
  BitString out;
  out.append_word(value, width);
  return out;
}

bool BitString::get(std::size_t i) const {
  if (i >= length_) throw std::out_of_range("bit index out of range");
  return test(i);
}

void BitString::set(std::size_t i, bool value) {
  if (i >= length_) throw std::out_of_range("bit index out of range");
  const std::uint64_t bit = std::uint64_t{1} << (i & 63);
  if (value) {
    words_[i >> 6] |= bit;
  } else {
    words_[i >> 6] &= ~bit;
  }
}

void BitString::flip(std::size_t i) {
  if (i >= length_) throw std::out_of_range("bit index out of range");
  words_[i >> 6] ^= std::uint64_t{1} << (i & 63);
}

void BitString::push_back(bool bit) {
  if (length_ % 64 == 0) words_.push_back(0);
  if (bit) words_[length_ >> 6] |= std::uint64_t{1} << (length_ & 63);
  ++length_;
}

void BitString::pop_back() {
  if (length_ == 0) throw std::out_of_range("pop_back on empty bit string");
  resize(length_ - 1);
}

void BitString::resize(std::size_t length) {
  words_.resize(words_for(length), 0);
  length_ = length;
  if (length_ % 64 != 0) words_.back() &= low_mask(length_ % 64);
}

void BitString::append(const BitString& other) {
  if (length_ % 64 == 0) {
    words_.insert(words_.end(), other.words_.begin(), other.words_.end());
    length_ += other.length_;
    return;
  }
  std::size_t remaining = other.length_;
  for (std::size_t w = 0; remaining > 0; ++w) {
    const std::size_t take = std::min<std::size_t>(64, remaining);
    append_word(other.words_[w], take);
    remaining -= take;
  }
}

void BitString::append_word(std::uint64_t value, std::size_t width) {
  if (width > 64) throw std::invalid_argument("append_word width exceeds 64");
  if (width == 0) return;
  value &= low_mask(width);
  const std::size_t shift = length_ & 63;
  if (shift == 0) {
    words_.push_back(value);
  } else {
    words_.back() |= value << shift;
    if (shift + width > 64) words_.push_back(value >> (64 - shift));
  }
  length_ += width;
}

std::uint64_t BitString::extract(std::size_t pos, std::size_t width) const {
  if (width > 64) throw std::invalid_argument("extract width exceeds 64");
  if (pos > length_ || width > length_ - pos) throw std::out_of_range("extract out of range");
  return extract_unchecked(pos, width);
}

std::uint64_t BitString::extract_unchecked(std::size_t pos, std::size_t width) const {
  if (width == 0) return 0;
  const std::size_t w = pos >> 6;
  const std::size_t shift = pos & 63;
  std::uint64_t value = words_[w] >> shift;
  if (shift != 0 && shift + width > 64) value |= words_[w + 1] << (64 - shift);
  return value & low_mask(width);
}

BitString BitString::slice(std::size_t pos, std::size_t len) const {
  if (pos > length_ || len > length_ - pos) throw std::out_of_range("slice out of range");
  BitString out;
  out.words_.reserve(words_for(len));
  std::size_t done = 0;
  while (done < len) {
    const std::size_t take = std::min<std::size_t>(64, len - done);
    out.append_word(extract_unchecked(pos + done, take), take);
    done += take;
  }
  return out;
}

std::size_t BitString::popcount() const {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

BitString& BitString::operator^=(const BitString& other) {
  if (other.length_ != length_) throw std::invalid_argument("xor of bit strings with different lengths");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

std::vector<std::uint8_t> BitString::to_bytes() const {
  std::vector<std::uint8_t> out((length_ + 7) / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
  }
  return out;
}

std::string BitString::to_text() const {
  std::string out(length_, '0');
  for (std::size_t i = 0; i < length_; ++i) {
    if (test(i)) out[i] = '1';
  }
  return out;
}

BitString concat(std::initializer_list<const BitString*> parts) {
  BitString out;
  for (const auto* p : parts) out.append(*p);
  return out;
}

std::size_t hamming_distance(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming distance of unequal lengths");
  std::size_t total = 0;
  auto wa = a.words();
  auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) total += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  return total;
}

std::size_t hamming_distance_within(const BitString& a, std::size_t a_pos, const BitString& b,
                                    std::size_t b_pos, std::size_t len, std::size_t limit) {
  if (a_pos > a.size() || len > a.size() - a_pos || b_pos > b.size() || len > b.size() - b_pos) {
    throw std::out_of_range("hamming_distance_within out of range");
  }
  std::size_t total = 0;
  for (std::size_t done = 0; done < len; done += 64) {
    const std::size_t take = std::min<std::size_t>(64, len - done);
    const auto x = a.extract_unchecked(a_pos + done, take) ^ b.extract_unchecked(b_pos + done, take);
    total += static_cast<std::size_t>(std::popcount(x));
    if (total > limit) return limit + 1;
  }
  return total;
}

BlockView::BlockView(const BitString& source, std::size_t block_size)
    : source_(&source), block_size_(block_size), count_(0) {
  if (block_size == 0) throw std::invalid_argument("block size must be positive");
  count_ = source.size() / block_size;
}

BitString BlockView::block(std::size_t t) const {
  if (t >= count_) throw std::out_of_range("block index out of range");
  return source_->slice(t * block_size_, block_size_);
}

Fraction::Fraction(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
  if (d == 0 || n > d) throw std::invalid_argument("fraction must lie in [0, 1] with nonzero denominator");
}

bool Fraction::admits(std::uint64_t count, std::uint64_t total) const {
  return static_cast<unsigned __int128>(count) * den <= static_cast<unsigned __int128>(num) * total;
}

bool hamming_close(const BitString& y, const BitString& y2, Fraction delta) {
  if (y.size() != y2.size()) return false;
  return delta.admits(hamming_distance(y, y2), y.size());
}

bool block_equality_close(const BitString& y, const BitString& y2, Fraction delta, std::size_t ell) {
  if (ell == 0 || y.size() != y2.size() || y.size() % ell != 0 || y.empty()) return false;
  const std::size_t count = y.size() / ell;
  // Sub-blocks longer than 64 bits are compared in 64-bit chunks.
  auto sub_block_differs = [&](std::size_t s) {
    for (std::size_t done = 0; done < ell; done += 64) {
      const std::size_t take = std::min<std::size_t>(64, ell - done);
      if (y.extract_unchecked(s * ell + done, take) != y2.extract_unchecked(s * ell + done, take)) return true;
    }
    return false;
  };
  if (sub_block_differs(0)) return false;
  std::uint64_t differing = 0;
  for (std::size_t s = 1; s < count; ++s) differing += sub_block_differs(s) ? 1 : 0;
  return delta.admits(differing, count - 1);
}

Predicate Predicate::hamming(Fraction delta) { return Predicate(Hamming{delta}); }

Predicate Predicate::block_equality(Fraction delta, std::size_t ell) {
  if (ell == 0) throw std::invalid_argument("sub-block size must be positive");
  return Predicate(BlockEquality{delta, ell});
}

Predicate Predicate::every_block_close(Predicate inner, std::size_t n) {
  if (n == 0) throw std::invalid_argument("block size must be positive");
  return Predicate(EveryBlockClose{std::make_shared<const Predicate>(std::move(inner)), n});
}

Predicate Predicate::equality() { return Predicate(Equality{}); }

bool Predicate::operator()(const BitString& a, const BitString& b) const {
  struct Visitor {
    const BitString& a;
    const BitString& b;
    bool operator()(const Hamming& h) const { return hamming_close(a, b, h.delta); }
    bool operator()(const BlockEquality& p) const { return block_equality_close(a, b, p.delta, p.ell); }
    bool operator()(const EveryBlockClose& p) const { return rwm::every_block_close(a, b, *p.inner, p.n); }
    bool operator()(const Equality&) const { return a == b; }
  };
  return std::visit(Visitor{a, b}, kind_);
}

bool every_block_close(const BitString& zeta_star, const BitString& y, const Predicate& inner, std::size_t n) {
  if (n == 0) throw std::invalid_argument("block size must be positive");
  if (zeta_star.empty() || zeta_star.size() % n != 0) return false;
  const BlockView lhs(zeta_star, n);
  const BlockView rhs(y, n);
  const std::size_t r = lhs.count();
  if (rhs.count() < r) return false;
  std::vector<BitString> star_blocks;
  star_blocks.reserve(r);
  for (std::size_t j = 0; j < r; ++j) star_blocks.push_back(lhs.block(j));
  for (std::size_t t = 0; t + r <= rhs.count(); ++t) {
    bool all = true;
    for (std::size_t j = 0; j < r && all; ++j) all = inner(star_blocks[j], rhs.block(t + j));
    if (all) return true;
  }
  return false;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  const std::size_t cap = sodium_base64_encoded_len(bytes.size(), sodium_base64_VARIANT_ORIGINAL);
  std::string out(cap, '\0');
  sodium_bin2base64(out.data(), cap, bytes.data(), bytes.size(), sodium_base64_VARIANT_ORIGINAL);
  out.resize(cap - 1);
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  std::vector<std::uint8_t> out(text.size() * 3 / 4 + 3);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len, &end,
                        sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != text.data() + text.size()) {
    throw std::invalid_argument("malformed base64");
  }
  out.resize(len);
  return out;
}

std::string encode_bitstream(const BitString& bits) {
  return "b" + std::to_string(bits.size()) + ":" + base64_encode(bits.to_bytes());
}

BitString decode_bitstream(std::string_view text) {
  std::string compact;
  compact.reserve(text.size());
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  }
  if (compact.empty() || compact[0] != 'b') return BitString::from_text(compact);
  const auto colon = compact.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("bitstream header missing ':'");
  std::size_t length = 0;
  const char* first = compact.data() + 1;
  const char* last = compact.data() + colon;
  auto [ptr, ec] = std::from_chars(first, last, length);
  if (ec != std::errc{} || ptr != last || first == last) throw std::invalid_argument("bad bitstream length header");
  const auto bytes = base64_decode(std::string_view(compact).substr(colon + 1));
  return BitString::from_bytes(bytes, length);
}

}  // namespace rwm
