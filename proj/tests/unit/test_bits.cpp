#include <string>
#include <vector>

#include "doctest.h"
#include "rwm/bits.hpp"
#include "rwm/rng.hpp"

using namespace rwm;

namespace {

// Naive reference predicates over '0'/'1' strings.
std::size_t ref_distance(const std::string& a, const std::string& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

bool ref_hamming(const std::string& a, const std::string& b, long num, long den) {
  if (a.size() != b.size()) return false;
  return static_cast<long>(ref_distance(a, b)) * den <= num * static_cast<long>(a.size());
}

bool ref_ebc(const std::string& star, const std::string& y, std::size_t n, long num, long den) {
  if (star.empty() || star.size() % n) return false;
  const std::size_t r = star.size() / n;
  const std::size_t blocks = y.size() / n;
  for (std::size_t t = 0; t + r <= blocks; ++t) {
    bool ok = true;
    for (std::size_t j = 0; j < r; ++j) {
      ok = ok && ref_hamming(star.substr(j * n, n), y.substr((t + j) * n, n), num, den);
    }
    if (ok) return true;
  }
  return false;
}

BitString T(const char* s) { return BitString::from_text(s); }

}  // namespace

TEST_CASE("bitstring basics") {
  BitString x(10);
  CHECK(x.size() == 10);
  CHECK(x.popcount() == 0);
  x.set(9, true);
  CHECK(x.get(9));
  CHECK_THROWS_AS(x.get(10), std::out_of_range);
  CHECK_THROWS_AS(x.set(10, true), std::out_of_range);
  CHECK_THROWS_AS(x.slice(5, 6), std::out_of_range);

  const auto a = T("0110");
  const auto b = T("101");
  const auto c = concat({&a, &b});
  CHECK(c.size() == a.size() + b.size());
  CHECK(c.to_text() == "0110101");
  CHECK(c.slice(2, 4).to_text() == "1010");
}

TEST_CASE("byte packing is little-endian within bytes") {
  const auto x = T("1000000001");  // bit 0 and bit 9
  const auto bytes = x.to_bytes();
  REQUIRE(bytes.size() == 2);
  CHECK(bytes[0] == 0x01);
  CHECK(bytes[1] == 0x02);
  CHECK(BitString::from_bytes(bytes, 10) == x);
  const std::vector<std::uint8_t> dirty = {0x01, 0x06};
  CHECK_THROWS_AS(BitString::from_bytes(dirty, 10), std::invalid_argument);
}

TEST_CASE("concat and slice agree on random lengths") {
  Rng rng = Rng::from_u64(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = rng.bits(rng.below(300));
    const auto b = rng.bits(rng.below(300));
    const auto c = concat({&a, &b});
    REQUIRE(c.size() == a.size() + b.size());
    CHECK(c.slice(0, a.size()) == a);
    CHECK(c.slice(a.size(), b.size()) == b);
    CHECK(c.to_text() == a.to_text() + b.to_text());
  }
}

TEST_CASE("block view discards trailing bits") {
  const auto y = T("1100101");
  const BlockView v(y, 3);
  CHECK(v.count() == 2);
  CHECK(v.block(0).to_text() == "110");
  CHECK(v.block(1).to_text() == "010");
  CHECK_THROWS(v.block(2));
}

TEST_CASE("hamming_close examples") {
  CHECK(hamming_close(T("0000"), T("0000"), Fraction(0, 1)));
  CHECK(hamming_close(T("0000"), T("0001"), Fraction(1, 4)));
  CHECK_FALSE(hamming_close(T("0000"), T("0011"), Fraction(1, 4)));
  CHECK_FALSE(hamming_close(T("000"), T("0000"), Fraction(1, 1)));
  CHECK_FALSE(hamming_close(T("000"), T("0000"), Fraction(0, 1)));
}

TEST_CASE("hamming_close exact thresholds avoid floating point") {
  // 1/3 of 3 bits admits exactly 1 differing bit.
  CHECK(hamming_close(T("000"), T("100"), Fraction(1, 3)));
  CHECK_FALSE(hamming_close(T("000"), T("110"), Fraction(1, 3)));
  // 3/10 of 10 bits admits exactly 3.
  CHECK(hamming_close(T("0000000000"), T("1110000000"), Fraction(3, 10)));
  CHECK_FALSE(hamming_close(T("0000000000"), T("1111000000"), Fraction(3, 10)));
}

TEST_CASE("hamming_close matches reference and its properties hold") {
  Rng rng = Rng::from_u64(2);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t len = 1 + rng.below(40);
    const auto a = rng.bits(len);
    auto b = a;
    const auto flips = rng.below(len + 1);
    for (std::uint64_t f = 0; f < flips; ++f) b.flip(rng.below(len));
    const auto den = 1 + rng.below(20);
    const auto num = rng.below(den + 1);
    const Fraction d(num, den);
    const bool close = hamming_close(a, b, d);
    CHECK(close == ref_hamming(a.to_text(), b.to_text(), static_cast<long>(num), static_cast<long>(den)));
    CHECK(close == hamming_close(b, a, d));
    CHECK(hamming_close(a, a, d));
    if (close && num < den) CHECK(hamming_close(a, b, Fraction(num + 1, den)));
  }
}

TEST_CASE("every_block_close examples") {
  Rng rng = Rng::from_u64(3);
  const std::size_t n = 16;
  const auto y = rng.bits(6 * n);
  CHECK(every_block_close(y, y, Predicate::equality(), n));
  CHECK(every_block_close(y, y, Predicate::equality(), 2 * n));

  // blocks 2..3 (one-based) with one flip each
  auto star = y.slice(n, 2 * n);
  star.flip(5);
  star.flip(n + 11);
  const auto ham = Predicate::hamming(Fraction(1, n));
  CHECK(ref_ebc(star.to_text(), y.to_text(), n, 1, n));
  CHECK(every_block_close(star, y, ham, n));
  // two flips in one block exceed 1/n
  auto star2 = star;
  star2.flip(6);
  CHECK(ref_ebc(star2.to_text(), y.to_text(), n, 1, n) == every_block_close(star2, y, ham, n));
  CHECK_FALSE(every_block_close(star2, y, ham, n));

  // misaligned substring
  const auto shifted = y.slice(n / 2, 2 * n);
  CHECK_FALSE(ref_ebc(shifted.to_text(), y.to_text(), n, 0, 1));
  CHECK_FALSE(every_block_close(shifted, y, Predicate::equality(), n));

  // not a multiple of n
  CHECK_FALSE(every_block_close(y.slice(0, n + 1), y, Predicate::equality(), n));
  CHECK_FALSE(every_block_close(BitString(), y, Predicate::equality(), n));
}

TEST_CASE("every_block_close single block equals existence of a close block") {
  Rng rng = Rng::from_u64(4);
  const std::size_t n = 8;
  const auto ham = Predicate::hamming(Fraction(1, 8));
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t blocks = 1 + rng.below(64);
    const auto y = rng.bits(blocks * n + rng.below(n));
    BitString star = rng.below(2) ? y.slice(rng.below(blocks) * n, n) : rng.bits(n);
    if (rng.below(2)) star.flip(rng.below(n));
    bool any = false;
    const BlockView v(y, n);
    for (std::size_t t = 0; t < v.count(); ++t) any = any || ham(star, v.block(t));
    CHECK(every_block_close(star, y, ham, n) == any);
    CHECK(every_block_close(star, y, ham, n) == ref_ebc(star.to_text(), y.to_text(), n, 1, 8));
  }
}

TEST_CASE("every_block_close is symmetric for equal lengths") {
  Rng rng = Rng::from_u64(5);
  const std::size_t n = 8;
  const auto ham = Predicate::hamming(Fraction(1, 4));
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = rng.bits(3 * n);
    auto b = a;
    for (int f = 0; f < 5; ++f) b.flip(rng.below(3 * n));
    CHECK(every_block_close(a, b, ham, n) == every_block_close(b, a, ham, n));
  }
}

TEST_CASE("block_equality_close examples") {
  Rng rng = Rng::from_u64(6);
  const std::size_t ell = 4;
  const std::size_t n = 64;  // 16 sub-blocks
  const Fraction delta(1, 5);  // floor(0.2 * 15) = 3
  const auto y = rng.bits(n);
  CHECK(block_equality_close(y, y, delta, ell));

  auto first = y;
  first.flip(2);
  CHECK_FALSE(block_equality_close(y, first, delta, ell));

  auto scrambled = y;
  for (std::size_t s : {3U, 7U, 12U}) {
    for (std::size_t b = 0; b < ell; ++b) scrambled.flip(s * ell + b);
  }
  CHECK(block_equality_close(y, scrambled, delta, ell));
  for (std::size_t b = 0; b < ell; ++b) scrambled.flip(9 * ell + b);
  CHECK_FALSE(block_equality_close(y, scrambled, delta, ell));

  CHECK_FALSE(block_equality_close(y, y.slice(0, n - 4), delta, ell));
  CHECK_FALSE(block_equality_close(y.slice(0, 62), y.slice(0, 62), delta, ell));
}

TEST_CASE("block_equality_close implies hamming_close") {
  Rng rng = Rng::from_u64(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t ell = 1 + rng.below(8);
    const std::size_t count = 2 + rng.below(20);
    const auto y = rng.bits(ell * count);
    auto y2 = y;
    const auto corrupt = rng.below(count);
    for (std::uint64_t c = 0; c < corrupt; ++c) {
      const auto s = 1 + rng.below(count - 1);
      for (std::size_t b = 0; b < ell; ++b) y2.set(s * ell + b, rng.below(2));
    }
    const auto den = 1 + rng.below(10);
    const Fraction d(rng.below(den + 1), den);
    if (block_equality_close(y, y2, d, ell)) CHECK(hamming_close(y, y2, d));
  }
}

TEST_CASE("hamming_distance_within stops early") {
  Rng rng = Rng::from_u64(8);
  const auto a = rng.bits(1000);
  const auto b = rng.bits(1000);
  const auto full = hamming_distance(a, b);
  CHECK(hamming_distance_within(a, 0, b, 0, 1000, 2000) == full);
  CHECK(hamming_distance_within(a, 0, b, 0, 1000, 10) == 11);
  const auto big = concat({&b, &a});
  CHECK(hamming_distance_within(a, 0, big, 1000, 1000, 0) == 0);
}

TEST_CASE("bitstream codec round trip") {
  Rng rng = Rng::from_u64(9);
  for (std::size_t len : {0U, 1U, 7U, 8U, 9U, 63U, 64U, 65U, 1000U}) {
    const auto x = rng.bits(len);
    const auto text = encode_bitstream(x);
    CHECK(text.rfind("b" + std::to_string(len) + ":", 0) == 0);
    CHECK(decode_bitstream(text) == x);
    CHECK(decode_bitstream(x.to_text()) == x);
  }
  CHECK(decode_bitstream("01 10\n1") == T("01101"));
  CHECK_THROWS(decode_bitstream("b5:"));
  CHECK_THROWS(decode_bitstream("bx:AA=="));
  CHECK_THROWS(decode_bitstream("0120"));
}
