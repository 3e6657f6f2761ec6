#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rwm/harness.hpp"
#include "rwm/keyfile.hpp"
#include "rwm/lm.hpp"
#include "rwm/rng.hpp"
#include "rwm/watermark.hpp"

using namespace rwm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;

std::string default_preset() {
  const char* env = std::getenv("RWM_PRESET");
  return env && *env ? env : "desk-default";
}

Rng make_rng(const std::string& seed_hex) { return seed_hex.empty() ? Rng::from_entropy() : Rng::from_hex(seed_hex); }

BitString read_bits_file(const std::string& path) { return decode_bitstream(read_file_text(path)); }

// A prompt is either a path to a bitstream file or an inline bitstream.
BitString read_prompt(const std::string& arg) {
  if (arg.empty()) return {};
  if (std::filesystem::is_regular_file(arg)) return read_bits_file(arg);
  return decode_bitstream(arg);
}

LanguageModel read_model(const std::string& path) {
  return path.empty() ? LanguageModel::uniform() : LanguageModel::from_json(read_file_text(path));
}

WatermarkKeySet load_generation_key(const std::string& path) {
  auto loaded = parse_key(read_file_bytes(path));
  if (!loaded.generation) throw std::invalid_argument(path + " is a verification key; generation needs the generation key");
  return std::move(*loaded.generation);
}

VerificationKey load_verification_key(const std::string& path) { return parse_key(read_file_bytes(path)).verification; }

void print_report(const VerificationReport& rep) {
  std::cout << "accepted=" << (rep.accepted ? 1 : 0) << '\n';
  std::cout << "matched_offset=";
  if (rep.matched_offset) std::cout << *rep.matched_offset;
  std::cout << '\n'
            << "chain_length_r=" << rep.chain_length_r << '\n'
            << "reason=" << to_string(rep.reason) << '\n'
            << "windows_scanned=" << rep.windows_scanned << '\n';
}

int run_params(const std::string& name) {
  const auto rep = describe_preset(preset_by_name(name));
  const auto& p = rep.preset;
  std::cout << "preset=" << p.name << '\n'
            << "n=" << p.n << '\n'
            << "ell=" << p.ell << '\n'
            << "r_sketch=" << p.r_sketch << '\n'
            << "repetition=" << p.repetition << '\n'
            << "signer=" << to_string(p.scheme) << '\n'
            << "capacity_bits=" << rep.capacity_k << '\n'
            << "syndrome_bits=" << rep.syndrome_bits << '\n'
            << "digest_bits=" << rep.digest_bits << '\n'
            << "sketch_bits=" << rep.sketch_bits << '\n'
            << "signature_bits=" << rep.signature_bits << '\n'
            << "sigma_bits=" << rep.sigma_bits << '\n'
            << "frame_bits=" << rep.frame_bits << '\n'
            << "capacity_slack=" << rep.capacity_slack << '\n'
            << "capacity_check=" << (rep.feasible ? "OK" : "FAIL") << '\n'
            << "sketch_lower_bound_bits=" << std::fixed << std::setprecision(3) << rep.lower_bound_bits << '\n'
            << "sketch_lower_bound_check=" << (rep.lower_bound_ok ? "OK" : "FAIL") << '\n'
            << "rds_delta=" << rep.rds_delta.num << '/' << rep.rds_delta.den << '\n'
            << "steg_delta=" << rep.steg_delta.num << '/' << rep.steg_delta.den << '\n';
  return rep.feasible && rep.lower_bound_ok ? kExitOk : kExitReject;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust, recoverable watermarking of bit-level language model output"};
  app.require_subcommand(1);

  auto* keygen = app.add_subcommand("keygen", "Create a generation key and its verification key");
  std::string kg_preset = default_preset();
  std::string kg_gen;
  std::string kg_ver;
  std::string kg_seed;
  keygen->add_option("--preset", kg_preset, "Parameter preset (default from RWM_PRESET)");
  keygen->add_option("--out-gen", kg_gen, "Generation key output path")->required();
  keygen->add_option("--out-ver", kg_ver, "Verification key output path")->required();
  keygen->add_option("--seed", kg_seed, "Hex seed for reproducible keys");

  auto* generate = app.add_subcommand("generate", "Sample watermarked output");
  std::string g_key;
  std::string g_model;
  std::string g_prompt;
  std::size_t g_blocks = 2;
  std::string g_seed;
  std::string g_out;
  std::string g_done;
  generate->add_option("--gen-key", g_key, "Generation key")->required();
  generate->add_option("--model", g_model, "Model spec JSON file (default uniform)");
  generate->add_option("--prompt", g_prompt, "Prompt bits, inline or as a file");
  generate->add_option("--blocks", g_blocks, "Number of n-bit blocks")->check(CLI::PositiveNumber);
  generate->add_option("--seed", g_seed, "Hex seed for sampling");
  generate->add_option("--out", g_out, "Output bitstream file")->required();
  generate->add_option("--done-marker", g_done, "Stop at the first block containing this bit pattern");

  auto* verify = app.add_subcommand("verify", "Check a bitstream for the watermark");
  std::string v_key;
  std::string v_in;
  std::size_t v_chain = 2;
  std::size_t v_stride = 1;
  verify->add_option("--ver-key", v_key, "Verification key (a generation key also works)")->required();
  verify->add_option("--in", v_in, "Input bitstream file")->required();
  verify->add_option("--chain", v_chain, "Chain length r")->check(CLI::Range(2, 1 << 20));
  verify->add_option("--stride", v_stride, "Window stride; n gives the block-aligned fast mode")
      ->check(CLI::PositiveNumber);

  auto* recover = app.add_subcommand("recover", "Recover watermarked substrings");
  std::string r_key;
  std::string r_in;
  std::string r_out;
  recover->add_option("--ver-key", r_key, "Verification key")->required();
  recover->add_option("--in", r_in, "Input bitstream file")->required();
  recover->add_option("--out", r_out, "Output directory")->required();

  auto* attack = app.add_subcommand("attack", "Run a simulated attack and report security predicates");
  std::string a_gen;
  std::string a_ver;
  std::string a_model;
  std::string a_spec;
  std::size_t a_trials = 100;
  std::string a_seed;
  std::string a_json;
  attack->add_option("--gen-key", a_gen, "Generation key")->required();
  attack->add_option("--ver-key", a_ver, "Verification key (must match the generation key)");
  attack->add_option("--model", a_model, "Model spec JSON file (default uniform)");
  attack->add_option("--attack", a_spec, "flip:C[:any] | scramble:F[:carrier|all][:nofirst] | splice:P | random[:L] | cross")
      ->required();
  attack->add_option("--trials", a_trials, "Number of trials")->check(CLI::PositiveNumber);
  attack->add_option("--seed", a_seed, "Hex seed");
  attack->add_option("--json", a_json, "Also write the summary as JSON to this path");

  auto* params = app.add_subcommand("params", "Print preset sizes and feasibility checks");
  std::string p_preset = default_preset();
  params->add_option("--preset", p_preset, "Parameter preset (default from RWM_PRESET)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*keygen) {
      Rng rng = make_rng(kg_seed);
      const auto keys = wm_gen(preset_by_name(kg_preset), rng);
      write_file_bytes(kg_gen, serialize_generation_key(keys));
      write_file_bytes(kg_ver, serialize_verification_key(keys.verification_key()));
      std::cout << "preset=" << kg_preset << '\n';
      return kExitOk;
    }
    if (*generate) {
      const auto keys = load_generation_key(g_key);
      const auto model = read_model(g_model);
      Rng rng = make_rng(g_seed);
      GenerateOptions opts;
      if (!g_done.empty()) opts.done_marker = decode_bitstream(g_done);
      const BitString y = wm_generate(keys, model, read_prompt(g_prompt), g_blocks, rng, opts);
      write_file_text(g_out, encode_bitstream(y) + "\n");
      std::cout << "bits=" << y.size() << '\n';
      return kExitOk;
    }
    if (*verify) {
      const auto vk = load_verification_key(v_key);
      const BitString zeta = read_bits_file(v_in);
      const auto rep = wm_verify_chain(vk, zeta, v_chain, VerifyOptions{v_stride});
      print_report(rep);
      return rep.accepted ? kExitOk : kExitReject;
    }
    if (*recover) {
      const auto vk = load_verification_key(r_key);
      const auto list = wm_recover(vk, read_bits_file(r_in));
      std::filesystem::create_directories(r_out);
      nlohmann::json index = nlohmann::json::array();
      for (std::size_t i = 0; i < list.entries.size(); ++i) {
        const auto& e = list.entries[i];
        std::ostringstream name;
        name << "recovered_" << std::setw(3) << std::setfill('0') << i << ".bits";
        write_file_text((std::filesystem::path(r_out) / name.str()).string(), encode_bitstream(e.content) + "\n");
        index.push_back({{"file", name.str()}, {"offset", e.offset}, {"r", e.r}, {"bits", e.content.size()}});
      }
      write_file_text((std::filesystem::path(r_out) / "index.json").string(), index.dump(2) + "\n");
      std::cout << "recovered=" << list.entries.size() << '\n';
      return list.empty() ? kExitReject : kExitOk;
    }
    if (*attack) {
      const auto keys = load_generation_key(a_gen);
      if (!a_ver.empty()) {
        const auto vk = load_verification_key(a_ver);
        if (serialize_verification_key(vk) != serialize_verification_key(keys.verification_key())) {
          throw std::invalid_argument("verification key does not belong to the generation key");
        }
      }
      const auto model = read_model(a_model);
      Rng rng = make_rng(a_seed);
      const auto summary = run_attack(keys, model, AttackSpec::parse(a_spec), a_trials, rng);
      std::cout << summary_to_kv(summary);
      if (!a_json.empty()) write_file_text(a_json, summary_to_json(summary) + "\n");
      return kExitOk;
    }
    if (*params) return run_params(p_preset);
  } catch (const std::exception& e) {
    std::cerr << "rwm: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
