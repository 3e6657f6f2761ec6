#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rwm/codes.hpp"
#include "rwm/harness.hpp"
#include "rwm/rng.hpp"
#include "rwm/sketch.hpp"
#include "rwm/watermark.hpp"

using namespace rwm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("criterion %d: %s  %s  [%s]\n", id, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void for_each_subset(std::size_t n, std::size_t max_weight, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    f(cur);
    if (cur.size() == max_weight) return;
    for (std::size_t j = start; j < n; ++j) {
      cur.push_back(j);
      rec(j + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

const WatermarkKeySet& desk_keys() {
  static const WatermarkKeySet keys = [] {
    Rng rng = Rng::from_u64(0xACCE97);
    return wm_gen(preset_by_name("desk-default"), rng);
  }();
  return keys;
}

void criterion1() {
  const auto& keys = desk_keys();
  const auto vk = keys.verification_key();
  const auto model = LanguageModel::uniform();
  Rng rng = Rng::from_u64(1);
  const auto t0 = Clock::now();
  std::size_t rejected = 0;
  const std::size_t trials = 1000;
  for (std::size_t t = 0; t < trials; ++t) {
    const BitString y = wm_generate(keys, model, rng.bits(32), 2, rng);
    if (y.size() != 2 * vk.n() || !wm_verify(vk, y).accepted) ++rejected;
  }
  const double secs = seconds_since(t0);
  report(1, rejected == 0 && secs <= 300.0, "desk-default generate->verify round trips",
         fmt("trials=%zu rejected=%zu seconds=%.1f limit=300", trials, rejected, secs));
}

struct AttackRun {
  AttackSummary summary;
  double seconds;
};

AttackRun timed_attack(const char* spec, std::size_t trials, std::uint64_t seed) {
  Rng rng = Rng::from_u64(seed);
  const auto t0 = Clock::now();
  auto s = run_attack(desk_keys(), LanguageModel::uniform(), AttackSpec::parse(spec), trials, rng);
  return {s, seconds_since(t0)};
}

std::vector<AttackRun> robustness_runs;

void criterion2() {
  const auto& p = desk_keys().preset;
  const std::string flip = "flip:" + std::to_string(p.r_sketch);
  robustness_runs.push_back(timed_attack(flip.c_str(), 500, 2));
  // 0.2 of the 4095 carrier sub-blocks stays inside one corruption per repetition group.
  robustness_runs.push_back(timed_attack("scramble:0.2:carrier", 500, 3));
  bool pass = true;
  std::string detail;
  for (const auto& run : robustness_runs) {
    const auto& s = run.summary;
    pass = pass && s.accept_rate() >= 0.99 && s.recover_exact_rate() >= 0.99;
    detail += fmt("%s: trials=%zu accept=%.4f recover_exact=%.4f seconds=%.1f; ", s.attack.c_str(), s.trials,
                  s.accept_rate(), s.recover_exact_rate(), run.seconds);
  }
  report(2, pass, "robustness within the sketch and payload radii", detail);
}

void criterion3() {
  // The robustness runs are reused and joined by planted and multi-block runs.
  std::vector<AttackRun> runs = robustness_runs;
  runs.push_back(timed_attack("splice:65536:blocks=3", 500, 4));
  runs.push_back(timed_attack("cross", 500, 5));
  std::size_t violations = 0;
  std::size_t nonempty = 0;
  std::size_t entries = 0;
  std::string detail;
  for (const auto& run : runs) {
    const auto& s = run.summary;
    violations += s.recovery_violations + s.fidelity_violations + s.unforgeability_violations;
    nonempty += s.recovered_any;
    entries += s.recovered_entries;
    detail += fmt("%s: recovered_any=%zu violations=%zu; ", s.attack.c_str(), s.recovered_any,
                  s.recovery_violations + s.fidelity_violations + s.unforgeability_violations);
  }
  report(3, violations == 0 && nonempty >= 500, "every recovery is an exact transcript substring of length (r-1)n",
         fmt("nonempty=%zu entries=%zu violations=%zu; ", nonempty, entries, violations) + detail);
}

void criterion4() {
  const auto vk = desk_keys().verification_key();
  Rng rng = Rng::from_u64(6);
  const auto t0 = Clock::now();
  std::size_t accepted = 0;
  std::size_t recovered = 0;
  const std::size_t trials = 1000;
  for (std::size_t t = 0; t < trials; ++t) {
    const BitString zeta = rng.bits(4 * vk.n());
    if (wm_verify(vk, zeta).accepted) ++accepted;
    if (!wm_recover(vk, zeta).empty()) ++recovered;
  }
  report(4, accepted == 0 && recovered == 0, "random 4n-bit inputs never verify or recover",
         fmt("trials=%zu accepted=%zu recovered=%zu seconds=%.1f", trials, accepted, recovered, seconds_since(t0)));
}

void criterion5() {
  const auto t0 = Clock::now();
  std::size_t cases = 0;
  std::size_t disagree = 0;
  std::size_t ambiguous = 0;
  auto compare = [&](const SharpSketchKey& key, const BruteForceSketchOracle& oracle, const Sketch& z,
                     const BitString& xp) {
    ++cases;
    try {
      if (oracle(z, xp, key.r()) != sketch_recover(key, z, xp)) ++disagree;
    } catch (const AmbiguityDetected&) {
      ++ambiguous;
    }
  };

  // unit-tiny: every perturbation of weight <= r around a few random messages.
  Rng rng = Rng::from_u64(7);
  const auto tiny = wm_gen(preset_by_name("unit-tiny"), rng);
  const auto& tkey = tiny.rds.pk.sketch_key;
  const BruteForceSketchOracle toracle(tkey);
  for (int m = 0; m < 3; ++m) {
    const BitString x = rng.bits(tkey.n());
    const auto z = sketch(tkey, x);
    for_each_subset(tkey.n(), tkey.r(), [&](const std::vector<std::size_t>& s) {
      BitString xp = x;
      for (auto j : s) xp.flip(j);
      compare(tkey, toracle, z, xp);
    });
  }
  const std::size_t tiny_cases = cases;

  // Random dense codes with n <= 20: every x' of weight <= r around each
  // message plus every x' in the space for the shortest length.
  struct Shape {
    std::size_t n, redundancy, distance, r;
  };
  for (const Shape sh : {Shape{12, 8, 5, 2}, Shape{16, 10, 5, 2}, Shape{20, 10, 5, 2}, Shape{20, 14, 7, 3},
                         Shape{14, 6, 3, 1}}) {
    auto code = std::shared_ptr<const LinearCode>(
        std::make_shared<DenseCode>(DenseCode::random(sh.n, sh.redundancy, sh.distance, rng)));
    Digest hk{};
    rng.fill(hk);
    for (std::size_t digest : {4, 16}) {
      const SharpSketchKey key(code, hk, sh.r, digest);
      const BruteForceSketchOracle oracle(key);
      for (int m = 0; m < 20; ++m) {
        const BitString x = rng.bits(sh.n);
        const auto z = sketch(key, x);
        if (sh.n <= 14) {
          for (std::uint64_t v = 0; v < (std::uint64_t{1} << sh.n); ++v) compare(key, oracle, z, BitString::from_word(v, sh.n));
        } else {
          for_each_subset(sh.n, sh.r, [&](const std::vector<std::size_t>& s) {
            BitString xp = x;
            for (auto j : s) xp.flip(j);
            compare(key, oracle, z, xp);
          });
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  report(5, disagree == 0 && ambiguous == 0 && cases >= 10000 && secs <= 120.0,
         "sketch_recover matches the brute-force oracle",
         fmt("cases=%zu unit_tiny_cases=%zu disagree=%zu ambiguous=%zu seconds=%.1f limit=120", cases, tiny_cases,
             disagree, ambiguous, secs));
}

void criterion6() {
  const std::size_t n = 16;
  const auto t0 = Clock::now();
  std::size_t runs = 0;
  std::size_t wrong = 0;
  std::size_t step_violations = 0;
  std::vector<std::uint64_t> deltas;
  for (std::uint64_t d = 0; d < (1U << n); ++d) {
    if (__builtin_popcountll(d) <= 3) deltas.push_back(d);
  }
  for (std::size_t r = 1; r <= 3; ++r) {
    auto hash = [](const BitString& v) { return v.extract(0, 16); };
    auto eval = [r](std::uint64_t z, std::uint64_t h) { return static_cast<std::size_t>(__builtin_popcountll(z ^ h)) <= r; };
    for (std::uint64_t x = 0; x < (1U << n); ++x) {
      for (const std::uint64_t d : deltas) {
        ++runs;
        std::int64_t last = -1;
        bool steps_ok = true;
        auto observer = [&](std::size_t, const BitString& zeta) {
          const auto f = static_cast<std::int64_t>(__builtin_popcountll(zeta.extract(0, 16) ^ x));
          if (last >= 0 && f - last != 1 && last - f != 1) steps_ok = false;
          last = f;
        };
        const auto got = generic_pph_recover(hash, eval, x, BitString::from_word(x ^ d, n), r, n, observer);
        const bool close = static_cast<std::size_t>(__builtin_popcountll(d)) <= r;
        if (close ? (!got || got->extract(0, n) != d) : got.has_value()) ++wrong;
        if (!steps_ok) ++step_violations;
      }
    }
  }
  report(6, wrong == 0 && step_violations == 0, "generic PPH walk with the identity PPH at n = 16",
         fmt("runs=%zu wrong=%zu step_violations=%zu r=1..3 seconds=%.1f", runs, wrong, step_violations,
             seconds_since(t0)));
}

void criterion7() {
  bool pass = true;
  std::string detail;
  for (const auto& p : shipped_presets()) {
    const auto rep = describe_preset(p);
    const bool ok = static_cast<double>(rep.sketch_bits) >= rep.lower_bound_bits && rep.lower_bound_ok;
    pass = pass && ok;
    detail += fmt("%s sketch=%zu bound=%.2f; ", p.name.c_str(), rep.sketch_bits, rep.lower_bound_bits);
  }
  report(7, pass, "sketch size meets log2 C(n, r) for every preset", detail);
}

void criterion8() {
  Rng rng = Rng::from_u64(8);
  const auto rep = undetectability_test(desk_keys(), LanguageModel::uniform(), 1000000, rng);
  report(8, rep.passed(), "uniform-model watermarked bits look uniform",
         fmt("bits=%zu chi2=%.3f p=%.4f autocorr=%.5f bound=%.5f", rep.bits, rep.chi_square, rep.chi_square_p,
             rep.autocorr, 3 * rep.autocorr_sigma));
}

void criterion9() {
  Rng rng = Rng::from_u64(9);
  std::size_t accepted = 0;
  for (const auto& p : shipped_presets()) {
    try {
      wm_gen(p, rng);
      ++accepted;
    } catch (const PresetInfeasible&) {
    }
  }
  std::vector<Preset> negative;
  Preset a = preset_by_name("unit-tiny");
  a.name = "unit-tiny-ed25519";
  a.scheme = SignerScheme::ed25519;
  negative.push_back(a);
  Preset b = preset_by_name("ci-small");
  b.name = "ci-small-digest256";
  b.digest_bits = 256;
  negative.push_back(b);
  Preset c = preset_by_name("desk-default");
  c.name = "desk-repetition5";
  c.repetition = 5;
  negative.push_back(c);
  std::size_t rejected = 0;
  for (const auto& p : negative) {
    try {
      wm_gen(p, rng);
    } catch (const PresetInfeasible&) {
      ++rejected;
    }
  }
  report(9, accepted == shipped_presets().size() && rejected == negative.size(),
         "wm_gen accepts feasible presets and rejects infeasible ones",
         fmt("positive accepted=%zu/%zu negative rejected=%zu/%zu", accepted, shipped_presets().size(), rejected,
             negative.size()));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("acceptance: %s  failures=%d seconds=%.1f\n", failures == 0 ? "PASS" : "FAIL", failures,
              seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
