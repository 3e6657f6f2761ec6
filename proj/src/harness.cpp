#include "rwm/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace rwm {

void AttackTranscript::record_generation(BitString prompt, BitString response) {
  entries_.push_back(TranscriptEntry{std::move(prompt), std::move(response)});
}

void AttackTranscript::record_verify(BitString input, VerificationReport report) {
  verify_calls_.push_back(VerifyCall{std::move(input), std::move(report)});
}

bool AttackTranscript::contains_response(const BitString& response) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.response == response; });
}

BitString RecordedOracle::generate(const BitString& prompt, std::size_t blocks, Rng& rng) {
  BitString y = wm_generate(*keys_, *model_, prompt, blocks, rng);
  transcript_->record_generation(prompt, y);
  return y;
}

VerificationReport RecordedOracle::verify(const BitString& zeta) {
  auto report = wm_verify(keys_->verification_key(), zeta);
  transcript_->record_verify(zeta, report);
  return report;
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::size_t parse_count(const std::string& s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("bad count in attack spec: " + s);
  return v;
}

double parse_fraction(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("bad fraction in attack spec: " + s);
  return v;
}

}  // namespace

AttackSpec AttackSpec::parse(const std::string& text) {
  auto parts = split(text, ':');
  if (parts.empty()) throw std::invalid_argument("empty attack spec");
  AttackSpec spec;
  if (parts.back().rfind("blocks=", 0) == 0) {
    spec.blocks = parse_count(parts.back().substr(7));
    if (spec.blocks < 2) throw std::invalid_argument("attacks need responses of at least 2 blocks");
    parts.pop_back();
  }
  const auto& kind = parts[0];
  if (kind == "flip") {
    if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument("usage: flip:COUNT[:any]");
    spec.kind = AttackKind::flip_per_block;
    spec.count = parse_count(parts[1]);
    if (parts.size() == 3) {
      if (parts[2] != "any") throw std::invalid_argument("flip modifier must be 'any'");
      spec.within_radius = false;
    }
  } else if (kind == "scramble") {
    if (parts.size() < 2 || parts.size() > 4) throw std::invalid_argument("usage: scramble:FRACTION[:carrier|all][:nofirst]");
    spec.kind = AttackKind::scramble_sub_blocks;
    spec.fraction = parse_fraction(parts[1]);
    if (parts.size() >= 3) {
      if (parts[2] == "carrier") {
        spec.scope = ScrambleScope::carrier;
      } else if (parts[2] == "all") {
        spec.scope = ScrambleScope::all_blocks;
        spec.within_radius = false;
      } else {
        throw std::invalid_argument("scramble scope must be 'carrier' or 'all'");
      }
    }
    if (parts.size() == 4) {
      if (parts[3] != "nofirst") throw std::invalid_argument("scramble modifier must be 'nofirst'");
      spec.preserve_first = false;
    }
  } else if (kind == "splice") {
    if (parts.size() != 2) throw std::invalid_argument("usage: splice:PADDING_BITS");
    spec.kind = AttackKind::splice_into_random;
    spec.padding_bits = parse_count(parts[1]);
  } else if (kind == "random") {
    if (parts.size() > 2) throw std::invalid_argument("usage: random[:LENGTH]");
    spec.kind = AttackKind::pure_random;
    if (parts.size() == 2) spec.length = parse_count(parts[1]);
  } else if (kind == "cross") {
    if (parts.size() != 1) throw std::invalid_argument("usage: cross");
    spec.kind = AttackKind::cross_response_splice;
  } else {
    throw std::invalid_argument("unknown attack kind: " + kind);
  }
  return spec;
}

std::string AttackSpec::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case AttackKind::flip_per_block:
      os << "flip:" << count << (within_radius ? "" : ":any");
      break;
    case AttackKind::scramble_sub_blocks:
      os << "scramble:" << fraction << ':' << (scope == ScrambleScope::carrier ? "carrier" : "all")
         << (preserve_first ? "" : ":nofirst");
      break;
    case AttackKind::splice_into_random:
      os << "splice:" << padding_bits;
      break;
    case AttackKind::pure_random:
      os << "random";
      if (length) os << ':' << length;
      break;
    case AttackKind::cross_response_splice:
      os << "cross";
      break;
  }
  if (blocks != 2) os << ":blocks=" << blocks;
  return os.str();
}

namespace {

// Remaining substitutions each repetition group tolerates in one carrier block.
class GroupBudget {
 public:
  explicit GroupBudget(const StegKey& steg)
      : code_(&steg.payload_code()), per_group_((code_->copies() - 1) / 2), used_(code_->dimension(), 0) {}
  bool take(std::size_t code_position) {
    const auto g = code_->group_of(code_position);
    if (g >= used_.size()) return true;  // unused tail position, ignored by the decoder
    if (used_[g] >= per_group_) return false;
    ++used_[g];
    return true;
  }
  std::size_t per_group() const { return per_group_; }

 private:
  const RepetitionCode* code_;
  std::size_t per_group_;
  std::vector<std::size_t> used_;
};

void flip_per_block(const AttackSpec& spec, const StegKey& steg, BitString& y, Rng& rng) {
  const std::size_t n = steg.n();
  const std::size_t ell = steg.ell();
  const std::size_t blocks = y.size() / n;
  const std::size_t first = spec.preserve_first ? ell : 0;
  if (spec.count > n - first) throw std::invalid_argument("flip count exceeds block size");
  for (std::size_t b = 0; b < blocks; ++b) {
    // Block 1 never carries a signature inside a verified window.
    const bool constrained = spec.within_radius && b > 0;
    GroupBudget budget(steg);
    std::vector<bool> used_bit(n, false);
    std::vector<bool> used_sub(steg.sub_blocks(), false);
    std::size_t done = 0;
    std::size_t guard = 0;
    while (done < spec.count) {
      if (++guard > 1000 * (spec.count + 1) + 100000) {
        throw std::invalid_argument("flip attack cannot stay within the payload-code radius");
      }
      const std::size_t q = first + rng.below(n - first);
      if (used_bit[q]) continue;
      if (constrained) {
        const std::size_t sub = q / ell;
        if (sub == 0 || used_sub[sub] || !budget.take(sub - 1)) continue;
        used_sub[sub] = true;
      }
      used_bit[q] = true;
      y.flip(b * n + q);
      ++done;
    }
  }
}

void scramble_sub_block(BitString& y, std::size_t pos, std::size_t ell, Rng& rng) {
  const auto fresh = rng.bits(ell);
  for (std::size_t i = 0; i < ell; ++i) y.set(pos + i, fresh.test(i));
}

void scramble_sub_blocks(const AttackSpec& spec, const StegKey& steg, BitString& y, Rng& rng) {
  const std::size_t n = steg.n();
  const std::size_t ell = steg.ell();
  const std::size_t blocks = y.size() / n;
  const std::size_t carriers = steg.code_length();
  const auto m = static_cast<std::size_t>(std::floor(spec.fraction * static_cast<double>(carriers)));
  const std::size_t begin = spec.scope == ScrambleScope::carrier ? blocks - 1 : 0;
  for (std::size_t b = begin; b < blocks; ++b) {
    const std::size_t base = b * n;
    if (spec.within_radius) {
      // A contiguous burst of code positions touches each repetition group at most once per k positions.
      const GroupBudget budget(steg);
      if (m > budget.per_group() * steg.capacity_k()) {
        throw std::invalid_argument("scramble fraction exceeds the payload-code radius");
      }
      const std::size_t start = rng.below(carriers - m + 1);
      for (std::size_t p = start; p < start + m; ++p) scramble_sub_block(y, base + (p + 1) * ell, ell, rng);
    } else {
      std::vector<std::size_t> order(carriers);
      for (std::size_t p = 0; p < carriers; ++p) order[p] = p;
      for (std::size_t i = 0; i < m; ++i) {
        std::swap(order[i], order[i + rng.below(carriers - i)]);
        scramble_sub_block(y, base + (order[i] + 1) * ell, ell, rng);
      }
    }
    if (!spec.preserve_first) scramble_sub_block(y, base, ell, rng);
  }
}

}  // namespace

BitString apply_attack(const AttackSpec& spec, const WatermarkKeySet& keys, const std::vector<BitString>& responses,
                       Rng& rng, std::optional<std::size_t>* planted) {
  const std::size_t n = keys.preset.n;
  if (planted) planted->reset();
  if (responses.empty()) throw std::invalid_argument("attack needs at least one response");
  const BitString& y = responses.front();
  switch (spec.kind) {
    case AttackKind::flip_per_block: {
      BitString out = y;
      flip_per_block(spec, keys.steg, out, rng);
      if (planted) *planted = 0;
      return out;
    }
    case AttackKind::scramble_sub_blocks: {
      BitString out = y;
      scramble_sub_blocks(spec, keys.steg, out, rng);
      if (planted) *planted = 0;
      return out;
    }
    case AttackKind::splice_into_random: {
      const std::size_t left = rng.below(spec.padding_bits + 1);
      BitString out = rng.bits(left);
      out.append(y);
      out.append(rng.bits(spec.padding_bits - left));
      if (planted) *planted = left;
      return out;
    }
    case AttackKind::pure_random:
      return rng.bits(spec.length ? spec.length : 4 * n);
    case AttackKind::cross_response_splice: {
      if (responses.size() < 2) throw std::invalid_argument("cross splice needs two responses");
      const BitString& other = responses[1];
      BitString out = y.slice(0, n);
      out.append(other.slice(n, other.size() - n));
      return out;
    }
  }
  throw std::invalid_argument("unknown attack");
}

bool is_substring(const BitString& needle, const BitString& hay) {
  if (needle.size() > hay.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    if (hamming_distance_within(needle, 0, hay, i, needle.size(), 0) == 0) return true;
  }
  return false;
}

bool ebc_close_to_transcript(const VerificationKey& vk, const BitString& zeta, const AttackTranscript& transcript) {
  const std::size_t n = vk.n();
  const std::size_t r = vk.rds.r();
  if (zeta.size() < n) return false;
  for (const auto& entry : transcript.entries()) {
    const std::size_t blocks = entry.response.size() / n;
    for (std::size_t b = 0; b < blocks; ++b) {
      for (std::size_t i = 0; i + n <= zeta.size(); ++i) {
        if (hamming_distance_within(zeta, i, entry.response, b * n, n, r) <= r) return true;
      }
    }
  }
  return false;
}

AttackSummary run_attack(const WatermarkKeySet& keys, const LanguageModel& model, const AttackSpec& spec,
                         std::size_t trials, Rng& rng) {
  AttackSummary s;
  s.attack = spec.to_string();
  s.trials = trials;
  const auto vk = keys.verification_key();
  const std::size_t n = vk.n();
  const auto ham = Predicate::hamming(Fraction(vk.rds.r(), n));

  for (std::size_t t = 0; t < trials; ++t) {
    Rng trial = rng.split();
    AttackTranscript transcript;
    RecordedOracle oracle(keys, model, transcript);
    std::vector<BitString> responses;
    const std::size_t queries = spec.kind == AttackKind::cross_response_splice ? 2 : 1;
    for (std::size_t q = 0; q < queries; ++q) responses.push_back(oracle.generate(trial.bits(64), spec.blocks, trial));

    std::optional<std::size_t> planted;
    const BitString zeta = apply_attack(spec, keys, responses, trial, &planted);
    for (const auto& y : responses) {
      if (!transcript.contains_response(y)) ++s.fidelity_violations;
    }

    const auto report = oracle.verify(zeta);
    const auto list = wm_recover(vk, zeta);
    const bool close = ebc_close_to_transcript(vk, zeta, transcript);
    if (report.accepted) ++s.accepted;
    if (close) ++s.ebc_close;
    if (report.accepted && !close) ++s.unforgeability_violations;
    if (planted && report.accepted) {
      const auto at = *report.matched_offset;
      if (at >= *planted && at + 2 * n <= *planted + responses.front().size()) ++s.planted_offset_hits;
    }

    if (!list.empty()) ++s.recovered_any;
    s.recovered_entries += list.entries.size();
    const BitString expected = responses.front().slice(0, (spec.blocks - 1) * n);
    bool exact = false;
    for (const auto& e : list.entries) {
      if (e.content == expected) exact = true;
      bool sound = false;
      const BitString window = zeta.slice(e.offset, (e.r - 1) * n);
      for (const auto& entry : transcript.entries()) {
        if (is_substring(e.content, entry.response) && every_block_close(window, entry.response, ham, n)) {
          sound = true;
          break;
        }
      }
      if (!sound || e.content.size() != (e.r - 1) * n) ++s.recovery_violations;
    }
    if (exact) ++s.recovered_exact;
  }
  return s;
}

BruteForceSketchOracle::BruteForceSketchOracle(const SharpSketchKey& key) : key_(&key) {
  const auto rows = key.code().parity_check_rows();
  if (rows.size() > 64) throw std::invalid_argument("brute-force oracle supports at most 64 parity rows");
  const std::size_t n = key.n();
  columns_.assign(n, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (rows[i].test(j)) columns_[j] |= std::uint64_t{1} << i;
    }
  }
  for (std::size_t j = 0; j < n; ++j) by_column_.emplace(columns_[j], j);
}

std::optional<BitString> BruteForceSketchOracle::operator()(const Sketch& z, const BitString& x_prime,
                                                            std::size_t r) const {
  const std::size_t n = key_->n();
  if (x_prime.size() != n) throw std::invalid_argument("oracle input length must equal n");
  if (z.syndrome.size() != key_->code().redundancy()) return std::nullopt;
  std::uint64_t stored = 0;
  for (std::size_t i = 0; i < z.syndrome.size(); ++i) stored |= std::uint64_t{z.syndrome.test(i)} << i;
  std::uint64_t target = stored;
  for (std::size_t j = 0; j < n; ++j) {
    if (x_prime.test(j)) target ^= columns_[j];
  }

  std::optional<BitString> found;
  auto consider = [&](const std::vector<std::size_t>& support) {
    BitString candidate = x_prime;
    for (auto j : support) candidate.flip(j);
    if (crhf(*key_, candidate) != z.digest) return;
    if (found && *found != candidate) throw AmbiguityDetected("two preimages share one sketch");
    found = std::move(candidate);
  };

  // Every support of size <= r: choose all but the largest index explicitly
  // and look the largest one up by its column.
  std::vector<std::size_t> support;
  std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t start, std::uint64_t rest) {
    if (support.empty() && rest == 0) consider(support);
    if (support.size() + 1 <= r) {
      auto [lo, hi] = by_column_.equal_range(rest);
      for (auto it = lo; it != hi; ++it) {
        if (it->second < start) continue;
        support.push_back(it->second);
        consider(support);
        support.pop_back();
      }
    }
    if (support.size() + 2 <= r) {
      for (std::size_t j = start; j < n; ++j) {
        support.push_back(j);
        rec(j + 1, rest ^ columns_[j]);
        support.pop_back();
      }
    }
  };
  rec(0, target);
  return found;
}

std::optional<BitString> brute_force_sketch_oracle(const SharpSketchKey& key, const Sketch& z,
                                                   const BitString& x_prime, std::size_t r) {
  return BruteForceSketchOracle(key)(z, x_prime, r);
}

UndetectabilityReport bit_statistics(const BitString& bits) {
  UndetectabilityReport rep;
  rep.bits = bits.size();
  rep.ones = bits.popcount();
  if (bits.size() < 2) return rep;
  const double N = static_cast<double>(bits.size());
  const double ones = static_cast<double>(rep.ones);
  const double zeros = N - ones;
  rep.chi_square = ((ones - N / 2) * (ones - N / 2) + (zeros - N / 2) * (zeros - N / 2)) / (N / 2);
  // One degree of freedom: P(chi2_1 > x) = erfc(sqrt(x / 2)).
  rep.chi_square_p = std::erfc(std::sqrt(rep.chi_square / 2));
  const double mean = ones / N;
  double num = 0;
  double den = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const double a = (bits.test(i) ? 1.0 : 0.0) - mean;
    den += a * a;
    if (i + 1 < bits.size()) num += a * ((bits.test(i + 1) ? 1.0 : 0.0) - mean);
  }
  rep.autocorr = den > 0 ? num / den : 0.0;
  rep.autocorr_sigma = 1.0 / std::sqrt(N);
  return rep;
}

UndetectabilityReport undetectability_test(const WatermarkKeySet& keys, const LanguageModel& model,
                                           std::size_t samples, Rng& rng) {
  const std::size_t n = keys.preset.n;
  const std::size_t blocks = std::max<std::size_t>(1, (samples + n - 1) / n);
  BitString y = wm_generate(keys, model, BitString(), blocks, rng);
  y.resize(samples);
  return bit_statistics(y);
}

std::string summary_to_kv(const AttackSummary& s) {
  std::ostringstream os;
  os << "attack=" << s.attack << '\n'
     << "trials=" << s.trials << '\n'
     << "accept_rate=" << s.accept_rate() << '\n'
     << "recover_exact_rate=" << s.recover_exact_rate() << '\n'
     << "recover_any_rate=" << s.recover_any_rate() << '\n'
     << "ebc_close_rate=" << s.ebc_close_rate() << '\n'
     << "planted_offset_hits=" << s.planted_offset_hits << '\n'
     << "recovered_entries=" << s.recovered_entries << '\n'
     << "unforgeability_violations=" << s.unforgeability_violations << '\n'
     << "recovery_violations=" << s.recovery_violations << '\n'
     << "fidelity_violations=" << s.fidelity_violations << '\n';
  return os.str();
}

std::string summary_to_json(const AttackSummary& s) {
  nlohmann::json j;
  j["attack"] = s.attack;
  j["trials"] = s.trials;
  j["accepted"] = s.accepted;
  j["accept_rate"] = s.accept_rate();
  j["recovered_exact"] = s.recovered_exact;
  j["recover_exact_rate"] = s.recover_exact_rate();
  j["recovered_any"] = s.recovered_any;
  j["recover_any_rate"] = s.recover_any_rate();
  j["ebc_close"] = s.ebc_close;
  j["ebc_close_rate"] = s.ebc_close_rate();
  j["planted_offset_hits"] = s.planted_offset_hits;
  j["recovered_entries"] = s.recovered_entries;
  j["unforgeability_violations"] = s.unforgeability_violations;
  j["recovery_violations"] = s.recovery_violations;
  j["fidelity_violations"] = s.fidelity_violations;
  return j.dump(2);
}

std::string undetectability_to_kv(const UndetectabilityReport& r) {
  std::ostringstream os;
  os << "bits=" << r.bits << '\n'
     << "ones=" << r.ones << '\n'
     << "chi_square=" << r.chi_square << '\n'
     << "chi_square_p=" << r.chi_square_p << '\n'
     << "autocorr=" << r.autocorr << '\n'
     << "autocorr_3sigma=" << 3.0 * r.autocorr_sigma << '\n'
     << "passed=" << (r.passed() ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace rwm
