#include "rwm/codes.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>

namespace rwm {

const char* to_string(CodeFamily family) {
  switch (family) {
    case CodeFamily::bch:
      return "bch";
    case CodeFamily::dense:
      return "dense";
    case CodeFamily::repetition:
      return "repetition";
  }
  return "unknown";
}

void LinearCode::check_length(const BitString& x) const {
  if (x.size() != n_) {
    throw std::invalid_argument("expected a length-" + std::to_string(n_) + " word, got " +
                                std::to_string(x.size()) + " bits");
  }
}

void LinearCode::check_syndrome(const BitString& s, std::size_t max_weight) const {
  if (s.size() != redundancy()) throw std::invalid_argument("syndrome length does not match code");
  if (max_weight > radius()) throw std::invalid_argument("max_weight exceeds the unique decoding radius");
}

std::optional<BitString> LinearCode::decode(const BitString& word) const {
  check_length(word);
  auto e = decode_syndrome(syndrome(word), radius());
  if (!e) return std::nullopt;
  return message_of(word ^ *e);
}

// ---------------------------------------------------------------------------
// GF(2^m)

namespace {

// Primitive polynomials, bit i = coefficient of x^i.
constexpr std::uint32_t kPrimitive[] = {
    0,      0,      0x7,    0xB,    0x13,   0x25,   0x43,    0x89,   0x11D,
    0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003,  0x1100B,
};

}  // namespace

GaloisField::GaloisField(unsigned m) : m_(m), order_((1U << m) - 1) {
  if (m < 2 || m > 16) throw std::invalid_argument("GF(2^m) supported for 2 <= m <= 16");
  exp_.assign(order_, 0);
  log_.assign(order_ + 1, -1);
  std::uint32_t a = 1;
  for (std::uint32_t i = 0; i < order_; ++i) {
    if (log_[a] != -1) throw std::logic_error("polynomial is not primitive");
    exp_[i] = a;
    log_[a] = i;
    a <<= 1;
    if (a & (1U << m)) a ^= kPrimitive[m];
  }
  if (a != 1) throw std::logic_error("polynomial is not primitive");
}

std::uint32_t GaloisField::mul(std::uint32_t a, std::uint32_t b) const {
  if (a == 0 || b == 0) return 0;
  return exp_[(static_cast<std::uint64_t>(log_[a]) + static_cast<std::uint64_t>(log_[b])) % order_];
}

std::uint32_t GaloisField::div(std::uint32_t a, std::uint32_t b) const {
  if (b == 0) throw std::domain_error("division by zero in GF(2^m)");
  if (a == 0) return 0;
  return exp_[(static_cast<std::uint64_t>(log_[a]) + order_ - static_cast<std::uint64_t>(log_[b])) % order_];
}

// ---------------------------------------------------------------------------
// BCH

namespace {

unsigned field_degree_for(std::size_t n) {
  unsigned m = 3;
  while (m <= 16 && ((std::size_t{1} << m) - 1) < n) ++m;
  if (m > 16) throw std::invalid_argument("BCH length exceeds 2^16 - 1");
  return m;
}

// Iterates the indices of set bits.
template <class F>
void for_each_set_bit(const BitString& x, F&& f) {
  const auto words = x.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    auto v = words[w];
    while (v) {
      f(w * 64 + static_cast<std::size_t>(std::countr_zero(v)));
      v &= v - 1;
    }
  }
}

}  // namespace

BchCode::BchCode(std::size_t n, std::size_t t) : LinearCode(n, 0, 2 * t + 1), t_(t), gf_(field_degree_for(n)) {
  if (t == 0) throw std::invalid_argument("BCH designed error count must be positive");
  const unsigned m = gf_.degree();
  const std::uint32_t order = gf_.order();
  // Each odd exponent below 2t must own a full-size cyclotomic coset distinct
  // from the others, so the m*t syndrome bits are independent.
  std::set<std::uint32_t> seen;
  std::vector<std::vector<std::uint32_t>> cosets;
  for (std::uint32_t i = 1; i < 2 * t; i += 2) {
    if (seen.count(i)) throw std::invalid_argument("BCH syndrome exponents share a cyclotomic coset");
    std::vector<std::uint32_t> coset;
    std::uint32_t c = i;
    do {
      coset.push_back(c);
      seen.insert(c);
      c = static_cast<std::uint32_t>((2ULL * c) % order);
    } while (c != i);
    if (coset.size() != m) throw std::invalid_argument("BCH cyclotomic coset smaller than field degree");
    cosets.push_back(std::move(coset));
  }
  if (n <= m * t) throw std::invalid_argument("BCH length too short for requested correction capability");
  k_ = n - m * t;

  // g(x) = product of minimal polynomials, computed over GF(2^m).
  std::vector<std::uint32_t> g{1};
  for (const auto& coset : cosets) {
    for (auto c : coset) {
      const std::uint32_t root = gf_.exp(c);
      std::vector<std::uint32_t> next(g.size() + 1, 0);
      for (std::size_t i = 0; i < g.size(); ++i) {
        next[i + 1] ^= g[i];
        next[i] ^= gf_.mul(g[i], root);
      }
      g = std::move(next);
    }
  }
  generator_ = BitString(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > 1) throw std::logic_error("BCH generator has non-binary coefficient");
    generator_.set(i, g[i] == 1);
  }
}

BitString BchCode::syndrome(const BitString& x) const {
  check_length(x);
  const unsigned m = gf_.degree();
  const std::uint32_t order = gf_.order();
  std::vector<std::uint32_t> s(t_, 0);
  for_each_set_bit(x, [&](std::size_t j) {
    for (std::size_t q = 0; q < t_; ++q) {
      const std::uint64_t i = 2 * q + 1;
      s[q] ^= gf_.exp((i * j) % order);
    }
  });
  BitString out;
  for (auto v : s) out.append_word(v, m);
  return out;
}

std::vector<std::uint32_t> BchCode::field_syndromes(const BitString& s) const {
  const unsigned m = gf_.degree();
  std::vector<std::uint32_t> full(2 * t_ + 1, 0);  // 1-based
  for (std::size_t q = 0; q < t_; ++q) full[2 * q + 1] = static_cast<std::uint32_t>(s.extract(q * m, m));
  for (std::size_t i = 2; i <= 2 * t_; i += 2) full[i] = gf_.square(full[i / 2]);
  return full;
}

std::optional<BitString> BchCode::decode_syndrome(const BitString& s, std::size_t max_weight) const {
  check_syndrome(s, max_weight);
  BitString e(n_);
  if (s.popcount() == 0) return e;
  const auto S = field_syndromes(s);
  const std::size_t two_t = 2 * t_;

  // Berlekamp-Massey for the error locator.
  std::vector<std::uint32_t> C(2 * two_t + 2, 0);
  std::vector<std::uint32_t> B(2 * two_t + 2, 0);
  C[0] = B[0] = 1;
  std::size_t L = 0;
  std::size_t shift = 1;
  std::uint32_t b = 1;
  for (std::size_t k = 0; k < two_t; ++k) {
    std::uint32_t d = S[k + 1];
    for (std::size_t i = 1; i <= L; ++i) d ^= gf_.mul(C[i], S[k + 1 - i]);
    if (d == 0) {
      ++shift;
      continue;
    }
    const std::uint32_t coef = gf_.div(d, b);
    if (2 * L <= k) {
      const auto T = C;
      for (std::size_t i = 0; i + shift < C.size(); ++i) C[i + shift] ^= gf_.mul(coef, B[i]);
      L = k + 1 - L;
      B = T;
      b = d;
      shift = 1;
    } else {
      for (std::size_t i = 0; i + shift < C.size(); ++i) C[i + shift] ^= gf_.mul(coef, B[i]);
      ++shift;
    }
  }
  if (L == 0 || L > max_weight) return std::nullopt;
  for (std::size_t i = L + 1; i < C.size(); ++i) {
    if (C[i] != 0) return std::nullopt;
  }

  // Chien search over the shortened positions: error at j iff Lambda(alpha^-j) = 0.
  const std::uint32_t order = gf_.order();
  std::vector<std::uint64_t> cur;
  std::vector<std::uint64_t> step;
  for (std::size_t i = 1; i <= L; ++i) {
    if (C[i] == 0) continue;
    cur.push_back(static_cast<std::uint64_t>(gf_.log(C[i])));
    step.push_back(order - (i % order));
  }
  std::size_t roots = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    std::uint32_t v = 1;
    for (std::size_t q = 0; q < cur.size(); ++q) {
      v ^= gf_.exp(cur[q]);
      cur[q] = (cur[q] + step[q]) % order;
    }
    if (v == 0) {
      e.set(j, true);
      if (++roots > L) return std::nullopt;
    }
  }
  if (roots != L) return std::nullopt;
  if (syndrome(e) != s) return std::nullopt;
  return e;
}

BitString BchCode::encode(const BitString& message) const {
  if (message.size() != k_) throw std::invalid_argument("BCH message length must equal k");
  const std::size_t r = n_ - k_;
  BitString rem(r);
  const BitString g_low = generator_.slice(0, r);
  for (std::size_t idx = k_; idx-- > 0;) {
    const bool feedback = message.test(idx) ^ rem.test(r - 1);
    // rem <<= 1 within r bits
    BitString shifted(1);
    shifted.append(rem.slice(0, r - 1));
    rem = std::move(shifted);
    if (feedback) rem ^= g_low;
  }
  BitString out = rem;
  out.append(message);
  return out;
}

BitString BchCode::message_of(const BitString& codeword) const { return codeword.slice(n_ - k_, k_); }

std::vector<BitString> BchCode::parity_check_rows() const {
  const unsigned m = gf_.degree();
  const std::uint32_t order = gf_.order();
  std::vector<BitString> rows(m * t_, BitString(n_));
  for (std::size_t q = 0; q < t_; ++q) {
    const std::uint64_t i = 2 * q + 1;
    for (std::size_t j = 0; j < n_; ++j) {
      const std::uint32_t v = gf_.exp((i * j) % order);
      for (unsigned bit = 0; bit < m; ++bit) {
        if ((v >> bit) & 1U) rows[q * m + bit].set(j, true);
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Dense

namespace {

std::uint32_t mask_of(const BitString& row) { return static_cast<std::uint32_t>(row.extract(0, row.size())); }

}  // namespace

DenseCode::DenseCode(std::vector<BitString> rows) : LinearCode(0, 0, 0), rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("dense code needs at least one parity row");
  n_ = rows_.front().size();
  if (n_ == 0 || n_ > kMaxLength) throw std::invalid_argument("dense code length must be in [1, 24]");
  for (const auto& r : rows_) {
    if (r.size() != n_) throw std::invalid_argument("parity rows have unequal lengths");
  }
  if (rows_.size() >= n_) throw std::invalid_argument("dense code must have positive dimension");
  if (gf2_rank(rows_) != rows_.size()) throw std::invalid_argument("parity-check matrix is not full rank");
  k_ = n_ - rows_.size();

  columns_.assign(n_, 0);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (rows_[i].test(j)) columns_[j] |= 1U << i;
    }
  }

  // Exact minimum distance by Gray-code enumeration of all words.
  d_ = n_ + 1;
  std::uint32_t syn = 0;
  std::size_t weight = 0;
  std::uint32_t word = 0;
  for (std::uint64_t step = 1; step < (std::uint64_t{1} << n_); ++step) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(step));
    word ^= 1U << bit;
    syn ^= columns_[bit];
    weight += (word >> bit) & 1U ? 1 : static_cast<std::size_t>(-1);
    if (syn == 0 && weight < d_) d_ = weight;
  }

  // Generator from the reduced row echelon form of H.
  std::vector<std::uint32_t> m;
  for (const auto& r : rows_) m.push_back(mask_of(r));
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n_ && row < m.size(); ++col) {
    std::size_t sel = row;
    while (sel < m.size() && !((m[sel] >> col) & 1U)) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[sel], m[row]);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i != row && ((m[i] >> col) & 1U)) m[i] ^= m[row];
    }
    pivots.push_back(col);
    ++row;
  }
  for (std::size_t col = 0; col < n_; ++col) {
    if (std::find(pivots.begin(), pivots.end(), col) != pivots.end()) continue;
    std::uint32_t v = 1U << col;
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      if ((m[i] >> col) & 1U) v |= 1U << pivots[i];
    }
    info_positions_.push_back(col);
    basis_.push_back(v);
  }

  // Syndrome table for every pattern of weight <= radius.
  const std::size_t rad = radius();
  std::function<void(std::size_t, std::size_t, std::uint32_t, std::uint32_t)> fill =
      [&](std::size_t start, std::size_t left, std::uint32_t e, std::uint32_t s) {
        table_.emplace(s, e);
        if (left == 0) return;
        for (std::size_t j = start; j < n_; ++j) fill(j + 1, left - 1, e | (1U << j), s ^ columns_[j]);
      };
  fill(0, rad, 0, 0);
}

DenseCode DenseCode::random(std::size_t n, std::size_t redundancy, std::size_t min_distance, Rng& rng) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<BitString> rows;
    for (std::size_t i = 0; i < redundancy; ++i) rows.push_back(rng.bits(n));
    if (gf2_rank(rows) != redundancy) continue;
    DenseCode code(std::move(rows));
    if (code.min_distance() >= min_distance) return code;
  }
  throw std::runtime_error("no random code with the requested minimum distance found");
}

BitString DenseCode::syndrome(const BitString& x) const {
  check_length(x);
  std::uint32_t s = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    if (x.test(j)) s ^= columns_[j];
  }
  return BitString::from_word(s, rows_.size());
}

std::optional<BitString> DenseCode::decode_syndrome(const BitString& s, std::size_t max_weight) const {
  check_syndrome(s, max_weight);
  const auto it = table_.find(static_cast<std::uint32_t>(s.extract(0, s.size())));
  if (it == table_.end()) return std::nullopt;
  if (static_cast<std::size_t>(std::popcount(it->second)) > max_weight) return std::nullopt;
  return BitString::from_word(it->second, n_);
}

BitString DenseCode::encode(const BitString& message) const {
  if (message.size() != k_) throw std::invalid_argument("dense code message length must equal k");
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < k_; ++i) {
    if (message.test(i)) v ^= basis_[i];
  }
  return BitString::from_word(v, n_);
}

BitString DenseCode::message_of(const BitString& codeword) const {
  BitString out;
  for (auto p : info_positions_) out.push_back(codeword.test(p));
  return out;
}

// ---------------------------------------------------------------------------
// Repetition

RepetitionCode::RepetitionCode(std::size_t message_bits, std::size_t copies, std::size_t length)
    : LinearCode(length, message_bits, copies), copies_(copies) {
  if (message_bits == 0 || copies == 0) throw std::invalid_argument("repetition code needs k >= 1 and copies >= 1");
  if (message_bits * copies > length) throw std::invalid_argument("repetition code does not fit in length");
}

RepetitionCode RepetitionCode::fitting(std::size_t length, std::size_t copies) {
  if (copies == 0) throw std::invalid_argument("repetition factor must be positive");
  return RepetitionCode(length / copies, copies, length);
}

BitString RepetitionCode::syndrome(const BitString& x) const {
  check_length(x);
  BitString s;
  for (std::size_t j = 0; j < k_; ++j) {
    for (std::size_t c = 1; c < copies_; ++c) s.push_back(x.test(j) ^ x.test(j + c * k_));
  }
  for (std::size_t p = k_ * copies_; p < n_; ++p) s.push_back(x.test(p));
  return s;
}

std::optional<BitString> RepetitionCode::decode_syndrome(const BitString& s, std::size_t max_weight) const {
  check_syndrome(s, max_weight);
  BitString e(n_);
  std::size_t total = 0;
  const std::size_t per = copies_ - 1;
  for (std::size_t j = 0; j < k_; ++j) {
    std::size_t w0 = 0;
    for (std::size_t c = 1; c < copies_; ++c) w0 += s.test(j * per + c - 1) ? 1 : 0;
    const bool flip_first = copies_ - w0 < w0;
    if (flip_first) e.set(j, true);
    for (std::size_t c = 1; c < copies_; ++c) {
      if (s.test(j * per + c - 1) != flip_first) e.set(j + c * k_, true);
    }
    total += std::min(w0, copies_ - w0);
  }
  for (std::size_t p = k_ * copies_, q = k_ * per; p < n_; ++p, ++q) {
    if (s.test(q)) {
      e.set(p, true);
      ++total;
    }
  }
  if (total > max_weight) return std::nullopt;
  return e;
}

BitString RepetitionCode::encode(const BitString& message) const {
  if (message.size() != k_) throw std::invalid_argument("repetition message length must equal k");
  BitString out;
  for (std::size_t c = 0; c < copies_; ++c) out.append(message);
  out.resize(n_);
  return out;
}

std::optional<BitString> RepetitionCode::decode(const BitString& word) const {
  check_length(word);
  BitString out(k_);
  for (std::size_t j = 0; j < k_; ++j) {
    const int v = vote(j, [&](std::size_t p) { return word.test(p); });
    if (v < 0) return std::nullopt;
    if (v == 1) out.set(j, true);
  }
  return out;
}

BitString RepetitionCode::message_of(const BitString& codeword) const { return codeword.slice(0, k_); }

std::vector<BitString> RepetitionCode::parity_check_rows() const {
  std::vector<BitString> rows;
  for (std::size_t j = 0; j < k_; ++j) {
    for (std::size_t c = 1; c < copies_; ++c) {
      BitString row(n_);
      row.set(j, true);
      row.set(j + c * k_, true);
      rows.push_back(std::move(row));
    }
  }
  for (std::size_t p = k_ * copies_; p < n_; ++p) {
    BitString row(n_);
    row.set(p, true);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr std::uint8_t kMatrixMagic[4] = {'R', 'W', 'M', 'H'};
constexpr std::uint8_t kMatrixVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{in[pos + i]} << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> serialize_parity_check(const LinearCode& code) {
  std::vector<std::uint8_t> out(std::begin(kMatrixMagic), std::end(kMatrixMagic));
  out.push_back(kMatrixVersion);
  out.push_back(static_cast<std::uint8_t>(code.family()));
  put_u32(out, static_cast<std::uint32_t>(code.length()));
  put_u32(out, static_cast<std::uint32_t>(code.dimension()));
  put_u32(out, static_cast<std::uint32_t>(code.min_distance()));
  BitString matrix;
  for (const auto& row : code.parity_check_rows()) matrix.append(row);
  const auto packed = matrix.to_bytes();
  out.insert(out.end(), packed.begin(), packed.end());
  return out;
}

std::unique_ptr<LinearCode> deserialize_parity_check(std::span<const std::uint8_t> blob) {
  constexpr std::size_t header = 4 + 1 + 1 + 12;
  if (blob.size() < header || !std::equal(std::begin(kMatrixMagic), std::end(kMatrixMagic), blob.begin())) {
    throw std::invalid_argument("not a parity-check blob");
  }
  if (blob[4] != kMatrixVersion) throw std::invalid_argument("unsupported parity-check blob version");
  const auto family = static_cast<CodeFamily>(blob[5]);
  const std::size_t n = get_u32(blob, 6);
  const std::size_t k = get_u32(blob, 10);
  const std::size_t d = get_u32(blob, 14);
  if (k > n) throw std::invalid_argument("parity-check blob has k > n");
  const std::size_t r = n - k;
  const std::size_t bits = r * n;
  if (blob.size() != header + (bits + 7) / 8) throw std::invalid_argument("parity-check blob has wrong size");
  const BitString matrix = BitString::from_bytes(blob.subspan(header), bits);
  std::vector<BitString> rows;
  for (std::size_t i = 0; i < r; ++i) rows.push_back(matrix.slice(i * n, n));

  std::unique_ptr<LinearCode> code;
  switch (family) {
    case CodeFamily::bch:
      if (d % 2 == 0) throw std::invalid_argument("BCH blob with even designed distance");
      code = std::make_unique<BchCode>(n, (d - 1) / 2);
      break;
    case CodeFamily::repetition:
      code = std::make_unique<RepetitionCode>(k, d, n);
      break;
    case CodeFamily::dense:
      code = std::make_unique<DenseCode>(rows);
      break;
    default:
      throw std::invalid_argument("unknown code family tag");
  }
  if (code->dimension() != k || code->min_distance() != d || code->parity_check_rows() != rows) {
    throw std::invalid_argument("parity-check blob does not match its declared code");
  }
  return code;
}

std::size_t gf2_rank(std::vector<BitString> rows) {
  std::size_t rank = 0;
  if (rows.empty()) return 0;
  const std::size_t n = rows.front().size();
  for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
    std::size_t sel = rank;
    while (sel < rows.size() && !rows[sel].test(col)) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[sel], rows[rank]);
    for (std::size_t i = rank + 1; i < rows.size(); ++i) {
      if (rows[i].test(col)) rows[i] ^= rows[rank];
    }
    ++rank;
  }
  return rank;
}

}  // namespace rwm
