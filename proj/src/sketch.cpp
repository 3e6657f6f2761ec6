#include "rwm/sketch.hpp"

#include <cmath>
#include <stdexcept>

namespace rwm {

namespace {

constexpr std::string_view kCrhfTag = "rwm.sketch.crhf.v1";

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t take_u32(std::span<const std::uint8_t> in, std::size_t& pos) {
  if (in.size() < pos + 4) throw std::invalid_argument("truncated sketch blob");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{in[pos + i]} << (8 * i);
  pos += 4;
  return v;
}

BitString take_bits(std::span<const std::uint8_t> in, std::size_t& pos) {
  const std::size_t len = take_u32(in, pos);
  const std::size_t bytes = (len + 7) / 8;
  if (in.size() < pos + bytes) throw std::invalid_argument("truncated sketch blob");
  auto out = BitString::from_bytes(in.subspan(pos, bytes), len);
  pos += bytes;
  return out;
}

}  // namespace

SharpSketchKey::SharpSketchKey(std::shared_ptr<const LinearCode> code, const Digest& crhf_key, std::size_t r,
                               std::size_t digest_bits)
    : code_(std::move(code)), crhf_key_(crhf_key), r_(r), digest_bits_(digest_bits) {
  if (!code_) throw std::invalid_argument("sketch key needs a code");
  if (r_ > code_->radius()) throw std::invalid_argument("sketch radius exceeds the code's decoding radius");
  if (2 * r_ >= code_->length()) throw std::invalid_argument("sketch radius must satisfy r < n/2");
  if (digest_bits_ == 0 || digest_bits_ > 256) throw std::invalid_argument("digest width must be in [1, 256]");
}

SharpSketchKey SharpSketchKey::sample(std::size_t n, std::size_t r, std::size_t digest_bits, Rng& rng) {
  if (r == 0) throw std::invalid_argument("sketch radius must be positive");
  auto code = std::make_shared<const BchCode>(n, r);
  return SharpSketchKey(std::move(code), rng.seed_bytes(), r, digest_bits);
}

BitString crhf(const SharpSketchKey& key, const BitString& x) {
  const auto d = Sha256().update(kCrhfTag).update(key.crhf_key()).update_bits(x).finish();
  return digest_prefix(d, key.digest_bits());
}

Sketch sketch(const SharpSketchKey& key, const BitString& x) {
  if (x.size() != key.n()) throw std::invalid_argument("sketch input length must equal n");
  return Sketch{key.code().syndrome(x), crhf(key, x)};
}

std::optional<BitString> sketch_recover(const SharpSketchKey& key, const Sketch& z, const BitString& x_prime) {
  if (x_prime.size() != key.n()) throw std::invalid_argument("sketch_recover input length must equal n");
  if (z.syndrome.size() != key.code().redundancy() || z.digest.size() != key.digest_bits()) return std::nullopt;
  const auto e = key.code().decode_syndrome(z.syndrome ^ key.code().syndrome(x_prime), key.r());
  if (!e) return std::nullopt;
  if (e->popcount() > key.r()) return std::nullopt;
  BitString candidate = x_prime ^ *e;
  if (crhf(key, candidate) != z.digest) return std::nullopt;
  return candidate;
}

std::vector<std::uint8_t> serialize_sketch(const Sketch& z) {
  std::vector<std::uint8_t> out;
  put_u32(out, static_cast<std::uint32_t>(z.syndrome.size()));
  const auto s = z.syndrome.to_bytes();
  out.insert(out.end(), s.begin(), s.end());
  put_u32(out, static_cast<std::uint32_t>(z.digest.size()));
  const auto d = z.digest.to_bytes();
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

Sketch deserialize_sketch(std::span<const std::uint8_t> in, std::size_t* consumed) {
  std::size_t pos = 0;
  Sketch z;
  z.syndrome = take_bits(in, pos);
  z.digest = take_bits(in, pos);
  if (consumed) {
    *consumed = pos;
  } else if (pos != in.size()) {
    throw std::invalid_argument("trailing bytes after sketch blob");
  }
  return z;
}

double sketch_size_lower_bound(std::size_t n, std::size_t r) {
  if (r > n) throw std::invalid_argument("lower bound needs r <= n");
  if (r == 0 || r == n) return 0.0;
  const double nn = static_cast<double>(n);
  const double rr = static_cast<double>(r);
  return (std::lgamma(nn + 1) - std::lgamma(rr + 1) - std::lgamma(nn - rr + 1)) / std::log(2.0);
}

}  // namespace rwm
