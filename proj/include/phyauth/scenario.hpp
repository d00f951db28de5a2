// SPDX-License-Identifier: Apache-2.0
//
// Scenario files are INI/TOML-like: top-level `seed` and `rounds`, then the
// sections [population], [quantizer], [test], [attack], [offload]. Every key
// is listed in scenario_help(); anything else is rejected.

#pragma once

#include "phyauth/iqi_signal.hpp"
#include "phyauth/offload.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace phyauth {

class ScenarioError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class QuantizerKind { Meb, UniformWidth, Random };
enum class StepTest { NP, GLRT };
// PairSnr: the per-sample noise of a round is |a_delta| / sqrt(r), where
// a_delta is the attacker's offset from the claimed record, or offset_ref for
// a legitimate device. Absolute: every round uses sigma.
enum class NoiseModel { PairSnr, Absolute };

const char* to_string(QuantizerKind k);
const char* to_string(StepTest t);
const char* to_string(NoiseModel n);

struct Scenario {
  std::uint64_t seed = 1;
  std::size_t rounds = 2000;

  // [population]
  std::size_t population = 200;
  double theta_m = 0.4363323129985824;  // 25 degrees
  double alpha_m = 0.04;
  ParamKind spec_kind = ParamKind::Case2Composite;
  double registration_sigma = 0.0;
  std::size_t registration_samples = 1;

  // [quantizer]
  QuantizerKind quantizer = QuantizerKind::Meb;
  std::size_t M = 2000;

  // [test]
  StepTest test = StepTest::NP;
  bool step2 = true;
  double rho = 0.01;
  std::size_t n_s = 512;
  NoiseModel noise = NoiseModel::PairSnr;
  double r = 0.03;
  double sigma = 1e-4;
  double offset_ref = 1e-7;

  // [attack]
  double attacker_fraction = 0.5;
  double close_delta = 1.1e-4;
  double victim_a = 1.00166;
  std::size_t attack_trials = 10000;
  int attack_key_bits = 1024;

  // [offload]
  long n_p = 10;
  std::vector<int> key_bits{1024, 2048, 3072, 4096};
  std::vector<double> phis{1.0, 0.3, 0.025};
  AvailabilityModel availability = AvailabilityModel::TimeShared;
  double deadline = 0.0;      // seconds; 0 means N_p times the device's per-packet time
  double host_freq_hz = 0.0;  // 0 means read /proc/cpuinfo
  int sign_reps = 15;
  double b_s = 1.0;
  double c_b = 1.0;

  PopulationBounds bounds() const { return {theta_m, alpha_m}; }
  CompositeParamSpec param_spec() const;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
nlohmann::json to_json(const Scenario& s);
std::string scenario_help();

}  // namespace phyauth
