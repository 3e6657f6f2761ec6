#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rwm/bits.hpp"
#include "rwm/codes.hpp"
#include "rwm/crypto.hpp"
#include "rwm/rng.hpp"

namespace rwm {

/// Sampled sketching function: a linear code for syndromes plus a keyed
/// collision-resistant hash truncated to digest_bits.
class SharpSketchKey {
 public:
  SharpSketchKey(std::shared_ptr<const LinearCode> code, const Digest& crhf_key, std::size_t r,
                 std::size_t digest_bits);
  /// BCH-backed key for length n correcting r errors.
  static SharpSketchKey sample(std::size_t n, std::size_t r, std::size_t digest_bits, Rng& rng);

  const LinearCode& code() const { return *code_; }
  std::shared_ptr<const LinearCode> code_ptr() const { return code_; }
  const Digest& crhf_key() const { return crhf_key_; }
  std::size_t r() const { return r_; }
  std::size_t n() const { return code_->length(); }
  std::size_t digest_bits() const { return digest_bits_; }
  std::size_t sketch_bits() const { return code_->redundancy() + digest_bits_; }

 private:
  std::shared_ptr<const LinearCode> code_;
  Digest crhf_key_;
  std::size_t r_;
  std::size_t digest_bits_;
};

struct Sketch {
  BitString syndrome;
  BitString digest;

  std::size_t bit_size() const { return syndrome.size() + digest.size(); }
  friend bool operator==(const Sketch&, const Sketch&) = default;
};

BitString crhf(const SharpSketchKey& key, const BitString& x);
Sketch sketch(const SharpSketchKey& key, const BitString& x);
/// The unique x with sketch(x) = z within distance r of x_prime, or nullopt.
std::optional<BitString> sketch_recover(const SharpSketchKey& key, const Sketch& z, const BitString& x_prime);

/// u32 LE syndrome bit length, packed syndrome, u32 LE digest bit length, packed digest.
std::vector<std::uint8_t> serialize_sketch(const Sketch& z);
/// Parses one sketch from the front of `in`; `consumed` receives the byte count.
Sketch deserialize_sketch(std::span<const std::uint8_t> in, std::size_t* consumed = nullptr);

/// log2 C(n, r).
double sketch_size_lower_bound(std::size_t n, std::size_t r);

struct NoWalkObserver {
  void operator()(std::size_t, const BitString&) const {}
};

/// Difference recovery from any Hamming PPH given oracle access to
/// hash(zeta) and eval(z, hash(zeta)). Returns x xor x_prime, or nullopt when
/// eval rejects x_prime or the walk finds no boundary. The observer sees
/// every walk point (j, zeta_j) starting with j = 0.
template <class Hash, class Eval, class Z, class Observer = NoWalkObserver>
std::optional<BitString> generic_pph_recover(Hash&& hash, Eval&& eval, const Z& z, const BitString& x_prime,
                                             std::size_t r, std::size_t n, Observer&& observer = {}) {
  if (x_prime.size() != n) throw std::invalid_argument("x_prime length must equal n");
  if (2 * r >= n) throw std::invalid_argument("generic recovery needs r < n/2");
  if (!eval(z, hash(x_prime))) return std::nullopt;

  BitString zeta = x_prime;
  observer(std::size_t{0}, zeta);
  bool found = false;
  for (std::size_t j = 0; j < n; ++j) {
    zeta.flip(j);
    observer(j + 1, zeta);
    if (!eval(z, hash(zeta))) {
      zeta.flip(j);
      found = true;
      break;
    }
  }
  if (!found) return std::nullopt;

  BitString delta(n);
  for (std::size_t j = 0; j < n; ++j) {
    zeta.flip(j);
    if (eval(z, hash(zeta))) delta.set(j, true);
    zeta.flip(j);
  }
  delta ^= x_prime;
  delta ^= zeta;
  return delta;
}

}  // namespace rwm
