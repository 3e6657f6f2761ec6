#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "rwm/harness.hpp"
#include "rwm/keyfile.hpp"
#include "rwm/lm.hpp"
#include "rwm/rng.hpp"
#include "rwm/sketch.hpp"
#include "rwm/watermark.hpp"

namespace py = pybind11;
using namespace rwm;

namespace {

Rng rng_from(const std::optional<std::string>& seed) { return seed ? Rng::from_hex(*seed) : Rng::from_entropy(); }

py::bytes to_py_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<std::uint8_t> from_py_bytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

py::dict report_dict(const PresetReport& r) {
  py::dict d;
  d["preset"] = r.preset.name;
  d["n"] = r.preset.n;
  d["ell"] = r.preset.ell;
  d["r_sketch"] = r.preset.r_sketch;
  d["repetition"] = r.preset.repetition;
  d["signer"] = std::string(to_string(r.preset.scheme));
  d["capacity_bits"] = r.capacity_k;
  d["syndrome_bits"] = r.syndrome_bits;
  d["digest_bits"] = r.digest_bits;
  d["sketch_bits"] = r.sketch_bits;
  d["signature_bits"] = r.signature_bits;
  d["sigma_bits"] = r.sigma_bits;
  d["prefix_bits"] = r.prefix_bits;
  d["frame_bits"] = r.frame_bits;
  d["capacity_slack"] = r.capacity_slack;
  d["lower_bound_bits"] = r.lower_bound_bits;
  d["lower_bound_ok"] = r.lower_bound_ok;
  d["feasible"] = r.feasible;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rwm, m) {
  m.doc() = "Robust, recoverable watermarking of bit-level language model output";

  py::register_exception<PresetInfeasible>(m, "PresetInfeasible", PyExc_ValueError);
  py::register_exception<EmbedFailure>(m, "EmbedFailure", PyExc_RuntimeError);

  py::class_<BitString>(m, "BitString")
      .def(py::init<>())
      .def(py::init<std::size_t>(), py::arg("length"))
      .def_static("from_text", [](const std::string& s) { return BitString::from_text(s); })
      .def_static("decode", [](const std::string& s) { return decode_bitstream(s); })
      .def("to_text", &BitString::to_text)
      .def("encode", [](const BitString& b) { return encode_bitstream(b); })
      .def("slice", &BitString::slice, py::arg("pos"), py::arg("length"))
      .def("popcount", &BitString::popcount)
      .def("flip", &BitString::flip)
      .def("__getitem__",
           [](const BitString& b, std::size_t i) {
             if (i >= b.size()) throw py::index_error();
             return b.test(i);
           })
      .def("__len__", &BitString::size)
      .def("__eq__", [](const BitString& a, const BitString& b) { return a == b; })
      .def("__repr__", [](const BitString& b) { return "<BitString " + std::to_string(b.size()) + " bits>"; });

  m.def("random_bits", [](std::size_t n, std::optional<std::string> seed) { return rng_from(seed).bits(n); },
        py::arg("n"), py::arg("seed") = std::nullopt);
  m.def("hamming_distance", &hamming_distance);
  m.def("sketch_size_lower_bound", &sketch_size_lower_bound, py::arg("n"), py::arg("r"));

  py::class_<LanguageModel>(m, "LanguageModel")
      .def_static("uniform", &LanguageModel::uniform)
      .def_static("biased", &LanguageModel::biased, py::arg("p"))
      .def_static("markov", &LanguageModel::markov, py::arg("order"), py::arg("table"))
      .def_static("from_json", [](const std::string& s) { return LanguageModel::from_json(s); })
      .def("to_json", &LanguageModel::to_json)
      .def("next_bit_prob", &LanguageModel::next_bit_prob)
      .def("min_entropy_per_block", &LanguageModel::min_entropy_per_block, py::arg("ell"));

  m.def("preset_names", [] {
    std::vector<std::string> names;
    for (const auto& p : shipped_presets()) names.push_back(p.name);
    return names;
  });
  m.def("describe_preset", [](const std::string& name) { return report_dict(describe_preset(preset_by_name(name))); });

  py::class_<VerificationKey>(m, "VerificationKey")
      .def_property_readonly("n", &VerificationKey::n)
      .def_property_readonly("preset", [](const VerificationKey& vk) { return vk.preset.name; })
      .def("serialize", [](const VerificationKey& vk) { return to_py_bytes(serialize_verification_key(vk)); });

  py::class_<WatermarkKeySet>(m, "KeySet")
      .def_property_readonly("preset", [](const WatermarkKeySet& k) { return k.preset.name; })
      .def("verification_key", &WatermarkKeySet::verification_key)
      .def("serialize", [](const WatermarkKeySet& k) { return to_py_bytes(serialize_generation_key(k)); });

  m.def(
      "keygen",
      [](const std::string& preset, std::optional<std::string> seed) {
        Rng rng = rng_from(seed);
        return wm_gen(preset_by_name(preset), rng);
      },
      py::arg("preset") = "unit-tiny", py::arg("seed") = std::nullopt);

  m.def("load_generation_key", [](const py::bytes& b) {
    auto loaded = parse_key(from_py_bytes(b));
    if (!loaded.generation) throw py::value_error("not a generation key");
    return std::move(*loaded.generation);
  });
  m.def("load_verification_key", [](const py::bytes& b) { return parse_key(from_py_bytes(b)).verification; });

  m.def(
      "generate",
      [](const WatermarkKeySet& keys, const LanguageModel& model, const BitString& prompt, std::size_t blocks,
         std::optional<std::string> seed) {
        Rng rng = rng_from(seed);
        return wm_generate(keys, model, prompt, blocks, rng);
      },
      py::arg("keys"), py::arg("model"), py::arg("prompt") = BitString(), py::arg("blocks") = 2,
      py::arg("seed") = std::nullopt);

  m.def(
      "verify",
      [](const VerificationKey& vk, const BitString& zeta, std::size_t chain) {
        const auto rep = wm_verify_chain(vk, zeta, chain);
        py::dict d;
        d["accepted"] = rep.accepted;
        d["matched_offset"] = rep.matched_offset;
        d["chain_length_r"] = rep.chain_length_r;
        d["reason"] = std::string(to_string(rep.reason));
        d["windows_scanned"] = rep.windows_scanned;
        return d;
      },
      py::arg("vk"), py::arg("zeta"), py::arg("chain") = 2);

  m.def("recover", [](const VerificationKey& vk, const BitString& zeta) {
    py::list out;
    for (const auto& e : wm_recover(vk, zeta).entries) {
      py::dict d;
      d["content"] = e.content;
      d["offset"] = e.offset;
      d["r"] = e.r;
      out.append(d);
    }
    return out;
  });

  m.def(
      "run_attack",
      [](const WatermarkKeySet& keys, const LanguageModel& model, const std::string& spec, std::size_t trials,
         std::optional<std::string> seed) {
        Rng rng = rng_from(seed);
        const auto s = run_attack(keys, model, AttackSpec::parse(spec), trials, rng);
        py::dict d;
        d["attack"] = s.attack;
        d["trials"] = s.trials;
        d["accept_rate"] = s.accept_rate();
        d["recover_exact_rate"] = s.recover_exact_rate();
        d["ebc_close_rate"] = s.ebc_close_rate();
        d["unforgeability_violations"] = s.unforgeability_violations;
        d["recovery_violations"] = s.recovery_violations;
        return d;
      },
      py::arg("keys"), py::arg("model"), py::arg("spec"), py::arg("trials") = 10, py::arg("seed") = std::nullopt);
}
