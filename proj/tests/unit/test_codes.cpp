#include <functional>
#include <map>

#include "doctest.h"
#include "rwm/codes.hpp"

using namespace rwm;

namespace {

// Independent H*x from explicit rows.
BitString matrix_syndrome(const std::vector<BitString>& rows, const BitString& x) {
  BitString s;
  for (const auto& row : rows) {
    std::size_t parity = 0;
    for (std::size_t j = 0; j < x.size(); ++j) parity ^= (row.test(j) && x.test(j)) ? 1 : 0;
    s.push_back(parity != 0);
  }
  return s;
}

void for_each_pattern(std::size_t n, std::size_t max_weight, const std::function<void(const BitString&)>& f) {
  std::function<void(std::size_t, std::size_t, BitString&)> rec = [&](std::size_t start, std::size_t left,
                                                                     BitString& e) {
    f(e);
    if (left == 0) return;
    for (std::size_t j = start; j < n; ++j) {
      e.set(j, true);
      rec(j + 1, left - 1, e);
      e.set(j, false);
    }
  };
  BitString e(n);
  rec(0, max_weight, e);
}

BitString random_error(Rng& rng, std::size_t n, std::size_t weight) {
  BitString e(n);
  while (e.popcount() < weight) e.set(rng.below(n), true);
  return e;
}

}  // namespace

TEST_CASE("GF(2^m) tables are consistent") {
  for (unsigned m = 2; m <= 16; ++m) {
    const GaloisField gf(m);
    CHECK(gf.order() == (1U << m) - 1);
    for (std::uint32_t a = 1; a <= std::min<std::uint32_t>(gf.order(), 300); ++a) {
      CHECK(gf.exp(static_cast<std::uint64_t>(gf.log(a))) == a);
      CHECK(gf.div(gf.mul(a, 7 % gf.order() + 1), 7 % gf.order() + 1) == a);
    }
  }
}

TEST_CASE("BCH(15,7) has the textbook generator and corrects two errors") {
  const BchCode code(15, 2);
  CHECK(code.dimension() == 7);
  CHECK(code.redundancy() == 8);
  CHECK(code.min_distance() == 5);
  CHECK(code.radius() == 2);
  // g(x) = 1 + x^4 + x^6 + x^7 + x^8 is a codeword
  const auto g = BitString::from_text("100010111000000");
  CHECK(code.syndrome(g).popcount() == 0);
  std::size_t checked = 0;
  for_each_pattern(15, 2, [&](const BitString& e) {
    const auto got = code.decode_syndrome(code.syndrome(e), 2);
    REQUIRE(got.has_value());
    CHECK(*got == e);
    ++checked;
  });
  CHECK(checked == 1 + 15 + 105);
}

TEST_CASE("BCH constructor rejects degenerate cosets") {
  // In GF(16) the coset of 5 has size 2, so t = 3 would lose syndrome rank.
  CHECK_THROWS_AS(BchCode(15, 3), std::invalid_argument);
  CHECK_THROWS_AS(BchCode(8, 2), std::invalid_argument);
  CHECK_THROWS_AS(BchCode(15, 0), std::invalid_argument);
}

TEST_CASE("BCH syndromes match the explicit parity-check matrix") {
  Rng rng = Rng::from_u64(11);
  for (auto [n, t] : {std::pair<std::size_t, std::size_t>{31, 3}, {100, 4}, {511, 2}}) {
    const BchCode code(n, t);
    const auto rows = code.parity_check_rows();
    REQUIRE(rows.size() == code.redundancy());
    CHECK(gf2_rank(rows) == code.redundancy());
    for (int trial = 0; trial < 20; ++trial) {
      const auto x = rng.bits(n);
      CHECK(code.syndrome(x) == matrix_syndrome(rows, x));
    }
    // syndrome of a unit vector is the matching column of H
    for (std::size_t j = 0; j < n; j += 7) {
      BitString e(n);
      e.set(j, true);
      BitString col;
      for (const auto& row : rows) col.push_back(row.test(j));
      const auto c = code.encode(rng.bits(code.dimension()));
      CHECK(code.syndrome(c ^ e) == col);
    }
  }
}

TEST_CASE("BCH exhaustive bounded-distance decoding at n = 31") {
  const BchCode code(31, 3);
  CHECK(code.redundancy() == 15);
  std::size_t count = 0;
  for_each_pattern(31, 3, [&](const BitString& e) {
    const auto got = code.decode_syndrome(code.syndrome(e), 3);
    REQUIRE(got.has_value());
    CHECK(*got == e);
    ++count;
  });
  CHECK(count == 1 + 31 + 465 + 4495);
  // weight-4 patterns: either NoDecode or a weight <= 3 vector with matching syndrome
  Rng rng = Rng::from_u64(12);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto e = random_error(rng, 31, 4);
    const auto s = code.syndrome(e);
    const auto got = code.decode_syndrome(s, 3);
    if (got) {
      CHECK(got->popcount() <= 3);
      CHECK(code.syndrome(*got) == s);
    }
  }
  CHECK_THROWS_AS(code.decode_syndrome(BitString(15), 4), std::invalid_argument);
  CHECK_THROWS_AS(code.decode_syndrome(BitString(14), 1), std::invalid_argument);
}

TEST_CASE("desk-scale BCH(32768, t=8)") {
  const BchCode code(32768, 8);
  CHECK(code.field().degree() == 16);
  CHECK(code.redundancy() == 128);
  Rng rng = Rng::from_u64(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto x = rng.bits(32768);
    const auto e = random_error(rng, 32768, 1 + rng.below(8));
    const auto s = code.syndrome(x) ^ code.syndrome(x ^ e);
    CHECK(s == code.syndrome(e));
    const auto got = code.decode_syndrome(s, 8);
    REQUIRE(got.has_value());
    CHECK(*got == e);
  }
}

TEST_CASE("desk-scale BCH parity-check matrix has full rank") {
  const BchCode code(32768, 8);
  CHECK(gf2_rank(code.parity_check_rows()) == 128);
}

TEST_CASE("BCH payload encode/decode") {
  Rng rng = Rng::from_u64(14);
  const BchCode code(63, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = rng.bits(code.dimension());
    const auto c = code.encode(m);
    CHECK(code.syndrome(c).popcount() == 0);
    const auto e = random_error(rng, 63, rng.below(4));
    const auto got = code.decode(c ^ e);
    REQUIRE(got.has_value());
    CHECK(*got == m);
  }
}

TEST_CASE("syndrome is linear") {
  Rng rng = Rng::from_u64(15);
  const BchCode bch(200, 5);
  const auto dense = DenseCode::random(20, 10, 4, rng);
  const RepetitionCode rep(6, 3, 20);
  const std::vector<const LinearCode*> codes = {&bch, &dense, &rep};
  for (const auto* code : codes) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto a = rng.bits(code->length());
      const auto b = rng.bits(code->length());
      CHECK(code->syndrome(a ^ b) == (code->syndrome(a) ^ code->syndrome(b)));
    }
    CHECK(code->syndrome(BitString(code->length())).popcount() == 0);
    CHECK_THROWS_AS(code->syndrome(BitString(code->length() + 1)), std::invalid_argument);
  }
}

TEST_CASE("dense codes decode every pattern inside the radius") {
  Rng rng = Rng::from_u64(16);
  std::size_t total = 0;
  for (auto [n, r, d] : {std::tuple<std::size_t, std::size_t, std::size_t>{12, 6, 3}, {16, 10, 5}, {20, 12, 5},
                         {24, 16, 7}}) {
    const auto code = DenseCode::random(n, r, d, rng);
    REQUIRE(code.min_distance() >= d);
    const auto rows = code.parity_check_rows();
    // brute-force minimum distance over dimension-k messages
    std::size_t best = n + 1;
    for (std::uint64_t m = 1; m < (std::uint64_t{1} << code.dimension()); ++m) {
      best = std::min(best, code.encode(BitString::from_word(m, code.dimension())).popcount());
    }
    CHECK(best == code.min_distance());
    const auto rad = code.radius();
    // map every syndrome to the set of weight<=rad preimages
    std::map<std::string, std::vector<BitString>> preimages;
    for_each_pattern(n, rad, [&](const BitString& e) { preimages[matrix_syndrome(rows, e).to_text()].push_back(e); });
    for (const auto& [s, list] : preimages) {
      CHECK(list.size() == 1);
      const auto got = code.decode_syndrome(BitString::from_text(s), rad);
      REQUIRE(got.has_value());
      CHECK(*got == list.front());
      ++total;
    }
    // one past the radius: contract only
    for_each_pattern(n, std::min<std::size_t>(rad + 1, 3), [&](const BitString& e) {
      if (e.popcount() != rad + 1) return;
      const auto s = code.syndrome(e);
      const auto got = code.decode_syndrome(s, rad);
      if (got) {
        CHECK(got->popcount() <= rad);
        CHECK(code.syndrome(*got) == s);
      }
    });
  }
  CHECK(total > 1000);
}

TEST_CASE("dense code exhaustive payload roundtrip, k <= 12") {
  Rng rng = Rng::from_u64(17);
  const auto code = DenseCode::random(20, 8, 4, rng);
  REQUIRE(code.dimension() == 12);
  for (std::uint64_t v = 0; v < 4096; ++v) {
    const auto m = BitString::from_word(v, 12);
    const auto c = code.encode(m);
    CHECK(code.syndrome(c).popcount() == 0);
    auto noisy = c;
    noisy.flip(rng.below(20));
    CHECK(code.decode(c) == m);
    CHECK(code.decode(noisy) == m);
  }
}

TEST_CASE("repetition code") {
  const RepetitionCode five(1, 5, 5);
  CHECK(five.encode(BitString::from_text("1")).to_text() == "11111");
  CHECK(five.min_distance() == 5);
  CHECK(five.radius() == 2);
  CHECK(five.decode(BitString::from_text("10110")) == BitString::from_text("1"));

  const RepetitionCode code(12, 3, 40);
  CHECK(code.redundancy() == 28);
  CHECK(code.group_of(13) == 1);
  CHECK(code.group_of(36) == 12);
  CHECK(gf2_rank(code.parity_check_rows()) == 28);
  Rng rng = Rng::from_u64(18);
  for (std::uint64_t v = 0; v < 4096; ++v) {
    const auto m = BitString::from_word(v, 12);
    const auto c = code.encode(m);
    REQUIRE(c.size() == 40);
    CHECK(code.syndrome(c).popcount() == 0);
    CHECK(code.decode(c) == m);
    auto noisy = c;
    noisy.flip(rng.below(40));
    CHECK(code.decode(noisy) == m);
    CHECK(code.decode_syndrome(code.syndrome(noisy), 1) == (noisy ^ c));
  }

  // even replication ties are reported as NoDecode
  const RepetitionCode four(2, 4, 8);
  auto tie = four.encode(BitString::from_text("10"));
  tie.flip(0);
  tie.flip(2);
  CHECK_FALSE(four.decode(tie).has_value());
  tie.flip(2);
  CHECK(four.decode(tie) == BitString::from_text("10"));

  const auto fit = RepetitionCode::fitting(4095, 4);
  CHECK(fit.dimension() == 1023);
}

TEST_CASE("repetition decode_syndrome exhaustive on a small instance") {
  const RepetitionCode code(3, 5, 17);
  const auto rows = code.parity_check_rows();
  std::size_t count = 0;
  for_each_pattern(17, 2, [&](const BitString& e) {
    const auto got = code.decode_syndrome(matrix_syndrome(rows, e), 2);
    REQUIRE(got.has_value());
    CHECK(*got == e);
    ++count;
  });
  CHECK(count == 1 + 17 + 136);
}

TEST_CASE("parity-check blob round trip") {
  Rng rng = Rng::from_u64(19);
  const BchCode bch(127, 3);
  const auto dense = DenseCode::random(18, 9, 4, rng);
  const RepetitionCode rep(10, 3, 33);
  const std::vector<const LinearCode*> codes = {&bch, &dense, &rep};
  for (const auto* code : codes) {
    auto blob = serialize_parity_check(*code);
    CHECK(blob[0] == 'R');
    const auto back = deserialize_parity_check(blob);
    CHECK(back->family() == code->family());
    CHECK(back->length() == code->length());
    CHECK(back->dimension() == code->dimension());
    CHECK(back->parity_check_rows() == code->parity_check_rows());
    auto tampered = blob;
    tampered.back() ^= 0x01;
    if (code->family() != CodeFamily::dense) CHECK_THROWS(deserialize_parity_check(tampered));
    auto truncated = blob;
    truncated.pop_back();
    CHECK_THROWS(deserialize_parity_check(truncated));
    auto magic = blob;
    magic[0] = 'X';
    CHECK_THROWS(deserialize_parity_check(magic));
  }
}
