// SPDX-License-Identifier: Apache-2.0
//
// Seeded experiment driver: population, offline registration, online rounds
// with attacker injection, the attack suite and the offload timing table.
// Every draw comes from a labeled sub-stream of the scenario seed.

#pragma once

#include "phyauth/auth_engine.hpp"
#include "phyauth/iqi_signal.hpp"
#include "phyauth/offload.hpp"
#include "phyauth/quantizer.hpp"
#include "phyauth/scenario.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace phyauth {

// Baselines. Both span [lo, hi] with M intervals.
QuantizerSpec uniform_width_quantizer(double lo, double hi, std::size_t M);
// M - 1 interior points drawn uniformly and sorted.
QuantizerSpec random_boundary_quantizer(double lo, double hi, std::size_t M, Rng& rng);

PiecewisePdf scenario_pdf(const Scenario& s);
// The kind named in s.quantizer over the population support.
QuantizerSpec build_quantizer(const Scenario& s, const PiecewisePdf& pdf);
QuantizerSpec build_quantizer(const Scenario& s, const PiecewisePdf& pdf, QuantizerKind kind);

struct Device {
  IqiProfile profile;
  double a_true = 0.0;
  PhyRecord record;
};

struct OfflineArtifacts {
  QuantizerSpec spec;
  Whitelist whitelist;
  std::vector<Device> devices;
};

// Device i's profile depends only on (seed, i), so a smaller population is a
// prefix of a larger one under the same seed.
OfflineArtifacts run_offline(const Scenario& s);
OfflineArtifacts run_offline(const Scenario& s, const QuantizerSpec& spec);

// n - sum_m (1 - (1 - p_m)^n): expected registrations landing in an
// already-occupied interval.
double expected_collisions(const std::vector<double>& masses, std::size_t n);

struct MetricsReport {
  std::size_t rounds = 0;
  std::size_t legit_rounds = 0;
  std::size_t attacker_rounds = 0;
  std::size_t accepts = 0;
  std::size_t step1_rejects = 0;
  std::size_t step2_rejects = 0;
  std::size_t unknown_id = 0;
  std::size_t correct = 0;
  std::size_t correct_step1 = 0;
  std::size_t legit_rejected = 0;
  std::size_t attacker_step2_reached = 0;
  std::size_t attacker_step2_rejected = 0;
  double cap = 0.0;        // correct / rounds, both steps
  double cap_step1 = 0.0;  // same rounds scored on step 1 alone
  double far = 0.0;        // legitimate rounds rejected / legitimate rounds
  double r_d_empirical = 0.0;  // attacker step-2 rejections / attackers reaching step 2
  std::vector<std::string> log;  // one JSON object per round

  nlohmann::json to_json() const;  // without the log
};

MetricsReport run_online(const Scenario& s, const OfflineArtifacts& off, bool keep_log = true);

struct CapPoint {
  std::size_t population = 0;
  QuantizerKind quantizer = QuantizerKind::Meb;
  std::uint64_t seed = 0;
  double cap_step1 = 0.0;
  double cap = 0.0;
  double far = 0.0;
};

// One online run per (seed, quantizer, population). Runs that share a seed
// share the population, the attacker draws and the noise.
std::vector<CapPoint> run_cap_sweep(const Scenario& base, const std::vector<std::size_t>& populations,
                                    const std::vector<QuantizerKind>& kinds,
                                    const std::vector<std::uint64_t>& seeds);

enum class AttackKind { Replay, CloseIqi, KeyCompromise };
const char* to_string(AttackKind k);

struct AttackReport {
  AttackKind kind = AttackKind::Replay;
  std::size_t trials = 0;
  std::size_t rejected = 0;
  std::size_t step1_rejects = 0;
  std::size_t step2_rejects = 0;
  double rejection_rate = 0.0;
  // Among trials that reached step 2.
  std::size_t step2_reached = 0;
  double step2_rejection_rate = 0.0;
  std::optional<double> predicted_step2_rate;  // NP closed form
  std::optional<double> glrt_rejection_rate;   // GLRT on the same samples
  std::optional<double> glrt_predicted_rate;
  std::optional<double> signature_only_accept_rate;
  double sigma = 0.0;

  nlohmann::json to_json() const;
};

// Uses s.M, s.population, s.n_s, s.rho and per-sample noise
// sigma = s.close_delta / sqrt(s.r) when s.noise is PairSnr, s.sigma otherwise.
std::vector<AttackReport> run_attack_suite(const Scenario& s);

struct OffloadRow {
  int key_bits = 0;
  double phi = 0.0;
  double host_sign_seconds = 0.0;
  double xi_ed = 0.0;
  double xi_pi = 0.0;
  double xi_laptop = 0.0;
  double deadline = 0.0;
  double all_ed = 0.0;
  // Single-server makespans; *_feasible is false when they break the busy cap.
  double all_pi = 0.0;
  bool all_pi_feasible = false;
  double all_laptop = 0.0;
  bool all_laptop_feasible = false;
  std::optional<OffloadPlan> opt_pi;
  std::optional<OffloadPlan> opt_laptop;
  std::string note;

  nlohmann::json to_json() const;
};

// Host signing times, keyed by RSA size. Pass precomputed values to skip timing.
std::map<int, double> calibrate_signing(const Scenario& s);
std::vector<OffloadRow> run_offload_experiment(const Scenario& s,
                                               const std::map<int, double>& host_seconds);
std::vector<OffloadRow> run_offload_experiment(const Scenario& s);

}  // namespace phyauth
