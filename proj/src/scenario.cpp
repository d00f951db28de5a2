// SPDX-License-Identifier: Apache-2.0

#include "phyauth/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace phyauth {

namespace pt = boost::property_tree;

const char* to_string(QuantizerKind k) {
  switch (k) {
    case QuantizerKind::Meb:
      return "meb";
    case QuantizerKind::UniformWidth:
      return "uniform";
    case QuantizerKind::Random:
      return "random";
  }
  return "?";
}

const char* to_string(StepTest t) { return t == StepTest::NP ? "np" : "glrt"; }

const char* to_string(NoiseModel n) { return n == NoiseModel::PairSnr ? "pair_snr" : "absolute"; }

namespace {

const char* param_kind_name(ParamKind k) {
  switch (k) {
    case ParamKind::Case1Theta:
      return "case1_theta";
    case ParamKind::Case1Alpha:
      return "case1_alpha";
    case ParamKind::Case2Composite:
      return "composite";
  }
  return "?";
}

struct KeyDoc {
  const char* key;
  const char* doc;
};

// section -> keys. "" is the top level.
const std::map<std::string, std::vector<KeyDoc>>& schema() {
  static const std::map<std::string, std::vector<KeyDoc>> s = {
      {"",
       {{"seed", "master seed, unsigned 64-bit"},
        {"rounds", "online authentication rounds"}}},
      {"population",
       {{"size", "number of legitimate devices"},
        {"theta_m", "phase mismatch bound, radians"},
        {"alpha_m", "amplitude mismatch bound"},
        {"spec_kind", "composite | case1_theta | case1_alpha"},
        {"registration_sigma", "noise std during offline registration"},
        {"registration_samples", "samples averaged per registration"}}},
      {"quantizer", {{"kind", "meb | uniform | random"}, {"M", "number of intervals"}}},
      {"test",
       {{"kind", "np | glrt"},
        {"step2", "true | false"},
        {"rho", "false-alarm rate"},
        {"Ns", "samples per authentication"},
        {"noise_model", "pair_snr | absolute"},
        {"r", "offset SNR a_delta^2 / sigma^2 (pair_snr)"},
        {"sigma", "per-sample noise std (absolute, attack suite)"},
        {"offset_ref", "reference offset for legitimate rounds (pair_snr)"}}},
      {"attack",
       {{"mix", "fraction of rounds driven by an attacker"},
        {"delta", "close-pair offset a_attacker - a_victim"},
        {"victim_a", "victim parameter for the close-pair attack"},
        {"trials", "trials per attack kind"},
        {"key_bits", "victim RSA key size"}}},
      {"offload",
       {{"Np", "packets to sign"},
        {"key_bits", "comma list of RSA sizes"},
        {"phi", "comma list of server availability fractions"},
        {"model", "time_shared | contiguous_window"},
        {"T", "deadline in seconds; 0 = Np times the device's per-packet time"},
        {"host_freq_hz", "host clock for calibration; 0 = /proc/cpuinfo"},
        {"reps", "signatures timed per key size"},
        {"b_s", "bits per packet (cycle model only)"},
        {"c_b", "cycles per bit (cycle model only)"}}},
  };
  return s;
}

std::string strip(std::string v) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!v.empty() && ws(static_cast<unsigned char>(v.back()))) v.pop_back();
  std::size_t i = 0;
  while (i < v.size() && ws(static_cast<unsigned char>(v[i]))) ++i;
  v.erase(0, i);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    v = v.substr(1, v.size() - 2);
  }
  return v;
}

double to_double(const std::string& where, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ScenarioError(where + ": expected a number, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& where, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v.front() == '-') throw std::invalid_argument("negative");
    const unsigned long long u = std::stoull(v, &pos, 0);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return u;
  } catch (const std::exception&) {
    throw ScenarioError(where + ": expected a non-negative integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& where, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ScenarioError(where + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = strip(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void apply(Scenario& s, const std::string& section, const std::string& key,
           const std::string& value) {
  const std::string where = (section.empty() ? "" : section + ".") + key;
  if (section.empty()) {
    if (key == "seed") s.seed = to_u64(where, value);
    else if (key == "rounds") s.rounds = to_u64(where, value);
  } else if (section == "population") {
    if (key == "size") s.population = to_u64(where, value);
    else if (key == "theta_m") s.theta_m = to_double(where, value);
    else if (key == "alpha_m") s.alpha_m = to_double(where, value);
    else if (key == "registration_sigma") s.registration_sigma = to_double(where, value);
    else if (key == "registration_samples") s.registration_samples = to_u64(where, value);
    else if (key == "spec_kind") {
      if (value == "composite") s.spec_kind = ParamKind::Case2Composite;
      else if (value == "case1_theta") s.spec_kind = ParamKind::Case1Theta;
      else if (value == "case1_alpha") s.spec_kind = ParamKind::Case1Alpha;
      else throw ScenarioError(where + ": unknown value '" + value + "'");
    }
  } else if (section == "quantizer") {
    if (key == "M") s.M = to_u64(where, value);
    else if (key == "kind") {
      if (value == "meb") s.quantizer = QuantizerKind::Meb;
      else if (value == "uniform") s.quantizer = QuantizerKind::UniformWidth;
      else if (value == "random") s.quantizer = QuantizerKind::Random;
      else throw ScenarioError(where + ": unknown value '" + value + "'");
    }
  } else if (section == "test") {
    if (key == "kind") {
      if (value == "np") s.test = StepTest::NP;
      else if (value == "glrt") s.test = StepTest::GLRT;
      else throw ScenarioError(where + ": unknown value '" + value + "'");
    } else if (key == "noise_model") {
      if (value == "pair_snr") s.noise = NoiseModel::PairSnr;
      else if (value == "absolute") s.noise = NoiseModel::Absolute;
      else throw ScenarioError(where + ": unknown value '" + value + "'");
    }
    else if (key == "step2") s.step2 = to_bool(where, value);
    else if (key == "rho") s.rho = to_double(where, value);
    else if (key == "Ns") s.n_s = to_u64(where, value);
    else if (key == "r") s.r = to_double(where, value);
    else if (key == "sigma") s.sigma = to_double(where, value);
    else if (key == "offset_ref") s.offset_ref = to_double(where, value);
  } else if (section == "attack") {
    if (key == "mix") s.attacker_fraction = to_double(where, value);
    else if (key == "delta") s.close_delta = to_double(where, value);
    else if (key == "victim_a") s.victim_a = to_double(where, value);
    else if (key == "trials") s.attack_trials = to_u64(where, value);
    else if (key == "key_bits") s.attack_key_bits = static_cast<int>(to_u64(where, value));
  } else if (section == "offload") {
    if (key == "Np") s.n_p = static_cast<long>(to_u64(where, value));
    else if (key == "key_bits") {
      s.key_bits.clear();
      for (const auto& v : split_list(value)) {
        s.key_bits.push_back(static_cast<int>(to_u64(where, v)));
      }
    } else if (key == "phi") {
      s.phis.clear();
      for (const auto& v : split_list(value)) s.phis.push_back(to_double(where, v));
    } else if (key == "model") {
      if (value == "time_shared") s.availability = AvailabilityModel::TimeShared;
      else if (value == "contiguous_window") s.availability = AvailabilityModel::ContiguousWindow;
      else throw ScenarioError(where + ": unknown value '" + value + "'");
    }
    else if (key == "T") s.deadline = to_double(where, value);
    else if (key == "host_freq_hz") s.host_freq_hz = to_double(where, value);
    else if (key == "reps") s.sign_reps = static_cast<int>(to_u64(where, value));
    else if (key == "b_s") s.b_s = to_double(where, value);
    else if (key == "c_b") s.c_b = to_double(where, value);
  }
}

void validate(const Scenario& s) {
  auto fail = [](const std::string& m) { throw ScenarioError(m); };
  if (!(s.theta_m > 0.0 && s.theta_m < 1.5707963267948966)) fail("population.theta_m must be in (0, pi/2)");
  if (!(s.alpha_m > 0.0 && s.alpha_m < 1.0)) fail("population.alpha_m must be in (0, 1)");
  if (s.registration_samples == 0) fail("population.registration_samples must be positive");
  if (!(s.registration_sigma >= 0.0)) fail("population.registration_sigma must be >= 0");
  if (s.M == 0) fail("quantizer.M must be positive");
  if (!(s.rho > 0.0 && s.rho < 1.0)) fail("test.rho must be in (0, 1)");
  if (s.n_s < 2) fail("test.Ns must be at least 2");
  if (!(s.r > 0.0)) fail("test.r must be positive");
  if (!(s.sigma >= 0.0)) fail("test.sigma must be >= 0");
  if (!(s.offset_ref >= 0.0)) fail("test.offset_ref must be >= 0");
  if (!(s.attacker_fraction >= 0.0 && s.attacker_fraction <= 1.0)) fail("attack.mix must be in [0, 1]");
  if (s.attack_key_bits < 1024 || s.attack_key_bits > 4096) fail("attack.key_bits must be in [1024, 4096]");
  if (s.n_p < 0) fail("offload.Np must be >= 0");
  for (int b : s.key_bits) {
    if (b < 1024 || b > 4096) fail("offload.key_bits entries must be in [1024, 4096]");
  }
  for (double p : s.phis) {
    if (!(p >= 0.0 && p <= 1.0)) fail("offload.phi entries must be in [0, 1]");
  }
  if (!(s.deadline >= 0.0)) fail("offload.T must be >= 0");
  if (s.sign_reps < 1) fail("offload.reps must be positive");
}

}  // namespace

CompositeParamSpec Scenario::param_spec() const {
  switch (spec_kind) {
    case ParamKind::Case1Theta:
      return CompositeParamSpec::case1_theta();
    case ParamKind::Case1Alpha:
      return CompositeParamSpec::case1_alpha();
    case ParamKind::Case2Composite:
      break;
  }
  return CompositeParamSpec::worked_example();
}

Scenario parse_scenario(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ScenarioError(std::string("scenario syntax: ") + e.what());
  }
  Scenario s;
  const auto& sch = schema();
  auto known = [&](const std::string& section, const std::string& key) {
    const auto it = sch.find(section);
    return it != sch.end() &&
           std::any_of(it->second.begin(), it->second.end(),
                       [&](const KeyDoc& d) { return key == d.key; });
  };
  for (const auto& [name, node] : tree) {
    if (node.empty() && (name.empty() || sch.find(name) == sch.end())) {
      if (!known("", name)) throw ScenarioError("unknown top-level key '" + name + "'");
      apply(s, "", name, strip(node.data()));
      continue;
    }
    if (sch.find(name) == sch.end() || name.empty()) {
      throw ScenarioError("unknown section [" + name + "]");
    }
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty() || !known(name, key)) {
        throw ScenarioError("unknown key '" + key + "' in [" + name + "]");
      }
      apply(s, name, key, strip(leaf.data()));
    }
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

nlohmann::json to_json(const Scenario& s) {
  return {
      {"seed", s.seed},
      {"rounds", s.rounds},
      {"population",
       {{"size", s.population},
        {"theta_m", s.theta_m},
        {"alpha_m", s.alpha_m},
        {"spec_kind", param_kind_name(s.spec_kind)},
        {"registration_sigma", s.registration_sigma},
        {"registration_samples", s.registration_samples}}},
      {"quantizer", {{"kind", to_string(s.quantizer)}, {"M", s.M}}},
      {"test",
       {{"kind", to_string(s.test)},
        {"step2", s.step2},
        {"rho", s.rho},
        {"Ns", s.n_s},
        {"noise_model", to_string(s.noise)},
        {"r", s.r},
        {"sigma", s.sigma},
        {"offset_ref", s.offset_ref}}},
      {"attack",
       {{"mix", s.attacker_fraction},
        {"delta", s.close_delta},
        {"victim_a", s.victim_a},
        {"trials", s.attack_trials},
        {"key_bits", s.attack_key_bits}}},
      {"offload",
       {{"Np", s.n_p},
        {"key_bits", s.key_bits},
        {"phi", s.phis},
        {"model", to_string(s.availability)},
        {"T", s.deadline},
        {"host_freq_hz", s.host_freq_hz},
        {"reps", s.sign_reps},
        {"b_s", s.b_s},
        {"c_b", s.c_b}}},
  };
}

std::string scenario_help() {
  std::ostringstream out;
  out << "Scenario file keys (INI style; unknown keys are errors):\n";
  for (const auto& [section, keys] : schema()) {
    out << (section.empty() ? "  (top level)" : "  [" + section + "]") << "\n";
    for (const auto& k : keys) {
      out << "    " << k.key << std::string(k.key[0] ? 22 - std::min<std::size_t>(21, std::char_traits<char>::length(k.key)) : 1, ' ') << k.doc << "\n";
    }
  }
  return out.str();
}

}  // namespace phyauth
