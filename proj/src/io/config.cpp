#include "pickless/io/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pickless/common/errors.hpp"
#include "pickless/common/hash.hpp"

namespace pickless::io {

using nlohmann::json;

basis::BandlimitParams BasisConfig::params() const {
  if (S) return basis::make_bandlimit_params(c, L, ell_max, *S, pswf_threshold);
  return basis::make_bandlimit_params(c, L, ell_max, pswf_threshold);
}

void ExperimentConfig::validate() const {
  require(basis.L >= 3, "basis.L must be >= 3");
  require(basis.ell_max >= 0, "basis.ell_max must be >= 0");
  require(basis.c > 0.0 && basis.c <= 0.5, "basis.c must lie in (0, 0.5]");
  require(basis.pswf_threshold > 0.0 && basis.pswf_threshold < 1.0, "basis.pswf_threshold must lie in (0, 1)");
  if (basis.S) require(static_cast<int>(basis.S->size()) == basis.ell_max + 1, "basis.S needs ell_max + 1 entries");
  simulate.sim.validate();
  require(simulate.micrographs >= 1, "simulate.micrographs must be >= 1");
  em.em.validate();
  require(em.K >= 1, "em.K must be >= 1");
  require(em.em.stages.back().ell_max <= basis.ell_max, "em.stages: final ell_max exceeds basis.ell_max");
  require(pick.options.energy_threshold >= 0.0, "pick.energy_threshold must be >= 0");
  require(pick.options.tolerance >= 0, "pick.tolerance must be >= 0");
  require(evaluate.align_options.rotations >= 1, "evaluate.rotations must be >= 1");
  require(evaluate.nyquist_fraction > 0.0 && evaluate.nyquist_fraction <= 1.0,
          "evaluate.nyquist_fraction must lie in (0, 1]");
  require(threads >= 0, "threads must be >= 0");
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["basis"] = {{"c", c.basis.c},
                {"L", c.basis.L},
                {"ell_max", c.basis.ell_max},
                {"pswf_threshold", c.basis.pswf_threshold},
                {"S", c.basis.S ? json(*c.basis.S) : json(nullptr)}};
  const auto& s = c.simulate.sim;
  j["simulate"] = {{"N", s.N},
                   {"gamma", s.gamma},
                   {"snr", std::isfinite(s.snr) ? json(s.snr) : json("inf")},
                   {"mode", simulate::to_string(s.mode)},
                   {"method", simulate::to_string(s.method)},
                   {"seed", s.seed},
                   {"L_tilde", s.L_tilde},
                   {"downsample_to", s.downsample_to ? json(*s.downsample_to) : json(nullptr)},
                   {"allow_partial", s.allow_partial},
                   {"micrographs", c.simulate.micrographs},
                   {"phantom", c.simulate.phantom},
                   {"phantom_seed", c.simulate.phantom_seed}};
  json stages = json::array();
  for (const auto& st : c.em.em.stages) stages.push_back({{"ell_max", st.ell_max}, {"iterations", st.max_iters}});
  j["em"] = {{"K", c.em.K},
             {"grid_seed", c.em.grid_seed},
             {"stages", stages},
             {"S", c.em.em.batch_fraction},
             {"epsilon", c.em.em.epsilon},
             {"stop", em::to_string(c.em.em.stop)},
             {"validation_fraction", c.em.em.validation_fraction},
             {"seed", c.em.em.seed},
             {"ridge", c.em.em.ridge},
             {"edge", c.em.edge == em::EdgePolicy::Crop ? "crop" : "pad"}};
  j["pick"] = {{"energy_threshold", c.pick.options.energy_threshold},
               {"tolerance", c.pick.options.tolerance},
               {"min_f1", c.pick.min_f1},
               {"min_accuracy", c.pick.min_accuracy}};
  j["evaluate"] = {{"align", c.evaluate.align},
                   {"rotations", c.evaluate.align_options.rotations},
                   {"fsc_threshold", c.evaluate.fsc_threshold},
                   {"nyquist_fraction", c.evaluate.nyquist_fraction}};
  j["output"] = c.output;
  j["cache_dir"] = c.cache_dir;
  j["threads"] = c.threads;
  return j;
}

namespace {

// Every key of `j` must exist in `ref` with a compatible JSON type.
void check_schema(const json& j, const json& ref, const std::string& path) {
  if (!j.is_object()) throw ValidationError("config: '" + (path.empty() ? "<root>" : path) + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!ref.contains(it.key())) throw ValidationError("config: unknown key '" + key + "'");
    const json& r = ref[it.key()];
    const json& v = it.value();
    if (r.is_object()) {
      check_schema(v, r, key);
      continue;
    }
    if (r.is_null() || v.is_null()) continue;  // nullable
    if (key == "simulate.snr" && (v.is_number() || v.is_string())) continue;  // "inf" allowed
    const bool ok = (r.is_number() && v.is_number()) || (r.is_boolean() && v.is_boolean()) ||
                    (r.is_string() && v.is_string()) || (r.is_array() && v.is_array());
    if (!ok) throw ValidationError("config: '" + key + "' has type " + v.type_name() + ", expected " + r.type_name());
  }
}

template <class T>
T num(const json& j, const char* key) {
  const json& v = j.at(key);
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      if (!(v.is_number_float() && v.get<double>() == std::floor(v.get<double>()))) {
        throw ValidationError(std::string("config: '") + key + "' must be an integer");
      }
      return static_cast<T>(v.get<double>());
    }
  }
  return v.get<T>();
}

}  // namespace

ExperimentConfig from_json(const json& in) {
  const json ref = to_json(ExperimentConfig{});
  check_schema(in, ref, "");
  json j = ref;
  j.merge_patch(in);
  // merge_patch drops explicit nulls; restore nullable keys the input cleared.
  for (const auto& [sec, key] : {std::pair{"basis", "S"}, std::pair{"simulate", "downsample_to"}}) {
    if (in.contains(sec) && in[sec].contains(key) && in[sec][key].is_null()) j[sec][key] = nullptr;
    if (!j[sec].contains(key)) j[sec][key] = nullptr;
  }
  ExperimentConfig c;
  try {
    const json& b = j["basis"];
    c.basis.c = num<double>(b, "c");
    c.basis.L = num<int>(b, "L");
    c.basis.ell_max = num<int>(b, "ell_max");
    c.basis.pswf_threshold = num<double>(b, "pswf_threshold");
    if (!b["S"].is_null()) c.basis.S = b["S"].get<std::vector<int>>();
    const json& s = j["simulate"];
    auto& sim = c.simulate.sim;
    sim.N = num<int>(s, "N");
    sim.gamma = num<double>(s, "gamma");
    sim.snr = s["snr"].is_string() ? std::stod(s["snr"].get<std::string>()) : num<double>(s, "snr");
    sim.mode = simulate::placement_mode_from_string(s["mode"].get<std::string>());
    sim.method = simulate::method_from_string(s["method"].get<std::string>());
    sim.seed = num<uint64_t>(s, "seed");
    sim.L_tilde = num<int>(s, "L_tilde");
    if (!s["downsample_to"].is_null()) sim.downsample_to = num<int>(s, "downsample_to");
    sim.allow_partial = s["allow_partial"].get<bool>();
    c.simulate.micrographs = num<int>(s, "micrographs");
    c.simulate.phantom = s["phantom"].get<std::string>();
    c.simulate.phantom_seed = num<uint64_t>(s, "phantom_seed");
    const json& e = j["em"];
    c.em.K = num<int>(e, "K");
    c.em.grid_seed = num<uint64_t>(e, "grid_seed");
    c.em.em.stages.clear();
    for (const auto& st : e["stages"]) {
      check_schema(st, json{{"ell_max", 0}, {"iterations", 0}}, "em.stages[]");
      c.em.em.stages.push_back({num<int>(st, "ell_max"), num<int>(st, "iterations")});
    }
    c.em.em.batch_fraction = num<double>(e, "S");
    c.em.em.epsilon = num<double>(e, "epsilon");
    c.em.em.stop = em::stop_mode_from_string(e["stop"].get<std::string>());
    c.em.em.validation_fraction = num<double>(e, "validation_fraction");
    c.em.em.seed = num<uint64_t>(e, "seed");
    c.em.em.ridge = num<double>(e, "ridge");
    const std::string edge = e["edge"].get<std::string>();
    if (edge != "crop" && edge != "pad") throw ValidationError("config: em.edge must be 'crop' or 'pad'");
    c.em.edge = edge == "crop" ? em::EdgePolicy::Crop : em::EdgePolicy::Pad;
    const json& p = j["pick"];
    c.pick.options.energy_threshold = num<double>(p, "energy_threshold");
    c.pick.options.tolerance = num<int>(p, "tolerance");
    c.pick.min_f1 = num<double>(p, "min_f1");
    c.pick.min_accuracy = num<double>(p, "min_accuracy");
    const json& v = j["evaluate"];
    c.evaluate.align = v["align"].get<bool>();
    c.evaluate.align_options.rotations = num<int>(v, "rotations");
    c.evaluate.fsc_threshold = num<double>(v, "fsc_threshold");
    c.evaluate.nyquist_fraction = num<double>(v, "nyquist_fraction");
    c.output = j["output"].get<std::string>();
    c.cache_dir = j["cache_dir"].get<std::string>();
    c.threads = num<int>(j, "threads");
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("config: ") + ex.what());
  }
  c.em.em.threads = c.threads;
  c.validate();
  return c;
}

uint64_t ExperimentConfig::hash() const {
  const json j = to_json(*this);
  const json h = {{"basis", j["basis"]}, {"simulate", j["simulate"]}, {"em", j["em"]}};
  return fnv1a64(h.dump());
}

std::string ExperimentConfig::hash_hex() const { return to_hex(hash()); }

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

void save_config(const std::string& path, const ExperimentConfig& c) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << to_json(c).dump(2) << '\n';
}

ExperimentConfig apply_overrides(const ExperimentConfig& c, const std::vector<std::string>& overrides) {
  json j = to_json(c);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("override '" + o + "' is not key=value");
    const std::string key = o.substr(0, eq), text = o.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }
    json* node = &j;
    std::stringstream ks(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ks, part, '.')) parts.push_back(part);
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
      if (!node->is_object() || !node->contains(parts[i])) throw ValidationError("config: unknown key '" + key + "'");
      node = &(*node)[parts[i]];
    }
    if (!node->is_object() || !node->contains(parts.back())) throw ValidationError("config: unknown key '" + key + "'");
    (*node)[parts.back()] = value;
  }
  return from_json(j);
}

}  // namespace pickless::io
