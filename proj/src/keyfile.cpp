#include "rwm/keyfile.hpp"

#include <sodium.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "rwm/crypto.hpp"

namespace rwm {

namespace {

constexpr std::uint8_t kMagic[8] = {'R', 'W', 'M', 'K', 'E', 'Y', 0, 1};
constexpr std::uint8_t kVersion = 1;

class Writer {
 public:
  void u8(std::uint8_t v) { out.push_back(v); }
  void u16(std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void raw(std::span<const std::uint8_t> b) { out.insert(out.end(), b.begin(), b.end()); }
  void blob(std::span<const std::uint8_t> b) {
    if (b.size() > 0xFFFF) throw std::invalid_argument("key field too large");
    u16(static_cast<std::uint16_t>(b.size()));
    raw(b);
  }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::span<const std::uint8_t> raw(std::size_t len) {
    if (in_.size() - pos_ < len) throw std::invalid_argument("truncated key file");
    auto s = in_.subspan(pos_, len);
    pos_ += len;
    return s;
  }
  std::uint8_t u8() { return raw(1)[0]; }
  std::uint16_t u16() {
    auto b = raw(2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32() {
    auto b = raw(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{b[i]} << (8 * i);
    return v;
  }
  std::span<const std::uint8_t> blob() { return raw(u16()); }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_header(Writer& w, KeyRole role, const Preset& p, const Seed& steg_seed, const Digest& crhf_key) {
  w.raw(kMagic);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(role));
  w.blob({reinterpret_cast<const std::uint8_t*>(p.name.data()), p.name.size()});
  w.u32(static_cast<std::uint32_t>(p.n));
  w.u32(static_cast<std::uint32_t>(p.ell));
  w.u32(static_cast<std::uint32_t>(p.r_sketch));
  w.u32(static_cast<std::uint32_t>(p.repetition));
  w.u8(static_cast<std::uint8_t>(p.scheme));
  w.u32(static_cast<std::uint32_t>(p.mac_bits));
  w.u32(static_cast<std::uint32_t>(p.digest_bits));
  w.raw(steg_seed);
  w.raw(crhf_key);
}

std::vector<std::uint8_t> finish(Writer& w) {
  const auto sum = Sha256().update(w.out).finish();
  w.raw(sum);
  return std::move(w.out);
}

std::vector<std::uint8_t> signer_seed(const SignerKeypair& kp) {
  if (kp.scheme() == SignerScheme::ed25519) {
    // libsodium's 64-byte secret key starts with the 32-byte seed.
    return {kp.secret_part.begin(), kp.secret_part.begin() + crypto_sign_SEEDBYTES};
  }
  return kp.secret_part;
}

}  // namespace

std::vector<std::uint8_t> serialize_generation_key(const WatermarkKeySet& keys) {
  Writer w;
  write_header(w, KeyRole::generation, keys.preset, keys.steg.seed(), keys.rds.pk.sketch_key.crhf_key());
  w.blob(signer_seed(keys.rds.dss));
  return finish(w);
}

std::vector<std::uint8_t> serialize_verification_key(const VerificationKey& vk) {
  Writer w;
  write_header(w, KeyRole::verification, vk.preset, vk.steg.seed(), vk.rds.sketch_key.crhf_key());
  w.blob(vk.rds.dss.key);
  return finish(w);
}

LoadedKey parse_key(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) + 32 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw std::invalid_argument("not an rwm key file");
  }
  const auto body = bytes.first(bytes.size() - 32);
  const auto sum = Sha256().update(body).finish();
  if (!std::equal(sum.begin(), sum.end(), bytes.end() - 32)) throw std::invalid_argument("key file checksum mismatch");

  Reader r(body);
  r.raw(sizeof(kMagic));
  if (r.u8() != kVersion) throw std::invalid_argument("unsupported key file version");
  const auto role_byte = r.u8();
  if (role_byte != 1 && role_byte != 2) throw std::invalid_argument("unknown key role");
  const auto role = static_cast<KeyRole>(role_byte);
  Preset p;
  const auto name = r.blob();
  p.name.assign(name.begin(), name.end());
  p.n = r.u32();
  p.ell = r.u32();
  p.r_sketch = r.u32();
  p.repetition = r.u32();
  const auto scheme = r.u8();
  if (scheme != 1 && scheme != 2) throw std::invalid_argument("unknown signer scheme in key file");
  p.scheme = static_cast<SignerScheme>(scheme);
  p.mac_bits = r.u32();
  p.digest_bits = r.u32();
  Seed steg_seed{};
  Digest crhf_key{};
  auto s = r.raw(32);
  std::copy(s.begin(), s.end(), steg_seed.begin());
  auto c = r.raw(32);
  std::copy(c.begin(), c.end(), crhf_key.begin());
  const auto material = r.blob();
  if (!r.done()) throw std::invalid_argument("trailing bytes in key file");

  if (role == KeyRole::generation) {
    auto keys = wm_keyset_from_parts(p, steg_seed, crhf_key, material);
    auto vk = keys.verification_key();
    return LoadedKey{role, std::move(keys), std::move(vk)};
  }
  SignerPublic pub;
  pub.scheme = p.scheme;
  pub.key.assign(material.begin(), material.end());
  pub.sig_len = p.scheme == SignerScheme::ed25519 ? crypto_sign_BYTES * 8 : p.mac_bits;
  return LoadedKey{role, std::nullopt, wm_verification_key_from_parts(p, steg_seed, crhf_key, pub)};
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string read_file_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace rwm
