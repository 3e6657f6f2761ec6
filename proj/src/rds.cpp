#include "rwm/rds.hpp"

#include <stdexcept>

namespace rwm {

namespace {

constexpr std::uint8_t kSignatureVersion = 1;

BitString signed_message(const Sketch& z) {
  const auto blob = serialize_sketch(z);
  return BitString::from_bytes(blob, blob.size() * 8);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t take_u32(std::span<const std::uint8_t> in, std::size_t& pos) {
  if (in.size() < pos + 4) throw std::invalid_argument("truncated signature blob");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{in[pos + i]} << (8 * i);
  pos += 4;
  return v;
}

}  // namespace

RdsKeypair rds_gen(const RdsParams& params, Rng& rng) {
  auto sketch_key = SharpSketchKey::sample(params.n, params.r, params.digest_bits, rng);
  auto dss = dss_gen(params.scheme, rng, params.mac_bits);
  RdsPublicKey pk{std::move(sketch_key), dss.public_part};
  return RdsKeypair{std::move(pk), std::move(dss)};
}

RobustSignature rds_sign(const RdsKeypair& kp, const BitString& y) {
  if (y.size() != kp.pk.n()) throw std::invalid_argument("rds_sign message length must equal n");
  RobustSignature sigma;
  sigma.z = sketch(kp.pk.sketch_key, y);
  sigma.tau = dss_sign(kp.dss, signed_message(sigma.z), kRdsSignContext);
  return sigma;
}

bool rds_verify(const RdsPublicKey& pk, const BitString& zeta, const RobustSignature& sigma) {
  return rds_recover(pk, zeta, sigma).has_value();
}

std::optional<BitString> rds_recover(const RdsPublicKey& pk, const BitString& zeta, const RobustSignature& sigma) {
  if (zeta.size() != pk.n()) return std::nullopt;
  if (sigma.z.syndrome.size() != pk.sketch_key.code().redundancy() ||
      sigma.z.digest.size() != pk.sketch_key.digest_bits()) {
    return std::nullopt;
  }
  if (!dss_verify(pk.dss, signed_message(sigma.z), sigma.tau, kRdsSignContext)) return std::nullopt;
  return sketch_recover(pk.sketch_key, sigma.z, zeta);
}

std::vector<std::uint8_t> serialize_signature(const RobustSignature& sigma) {
  std::vector<std::uint8_t> out{kSignatureVersion};
  const auto z = serialize_sketch(sigma.z);
  put_u32(out, static_cast<std::uint32_t>(z.size()));
  out.insert(out.end(), z.begin(), z.end());
  put_u32(out, static_cast<std::uint32_t>(sigma.tau.size()));
  const auto t = sigma.tau.to_bytes();
  out.insert(out.end(), t.begin(), t.end());
  return out;
}

RobustSignature deserialize_signature(std::span<const std::uint8_t> blob) {
  if (blob.empty() || blob[0] != kSignatureVersion) throw std::invalid_argument("unsupported signature blob version");
  std::size_t pos = 1;
  const std::size_t zlen = take_u32(blob, pos);
  if (blob.size() < pos + zlen) throw std::invalid_argument("truncated signature blob");
  RobustSignature sigma;
  sigma.z = deserialize_sketch(blob.subspan(pos, zlen));
  pos += zlen;
  const std::size_t tbits = take_u32(blob, pos);
  const std::size_t tbytes = (tbits + 7) / 8;
  if (blob.size() != pos + tbytes) throw std::invalid_argument("signature blob has wrong length");
  sigma.tau = BitString::from_bytes(blob.subspan(pos, tbytes), tbits);
  return sigma;
}

BitString pack_signature(const RobustSignature& sigma) {
  return concat({&sigma.z.syndrome, &sigma.z.digest, &sigma.tau});
}

std::optional<RobustSignature> unpack_signature(const RdsPublicKey& pk, const BitString& bits) {
  if (bits.size() != pk.signature_bits()) return std::nullopt;
  const std::size_t s = pk.sketch_key.code().redundancy();
  const std::size_t d = pk.sketch_key.digest_bits();
  RobustSignature sigma;
  sigma.z.syndrome = bits.slice(0, s);
  sigma.z.digest = bits.slice(s, d);
  sigma.tau = bits.slice(s + d, pk.dss.sig_len);
  return sigma;
}

}  // namespace rwm
