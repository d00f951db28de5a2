// SPDX-License-Identifier: Apache-2.0

#include "phyauth/harness.hpp"

#include "phyauth/ndn_packet.hpp"
#include "phyauth/ndn_security.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace phyauth {

QuantizerSpec uniform_width_quantizer(double lo, double hi, std::size_t M) {
  if (M == 0 || !(hi > lo)) {
    throw QuantizerError("uniform_width_quantizer: need M > 0 and hi > lo");
  }
  std::vector<double> b(M + 1);
  for (std::size_t m = 0; m <= M; ++m) {
    b[m] = lo + (hi - lo) * static_cast<double>(m) / static_cast<double>(M);
  }
  b.back() = hi;
  return QuantizerSpec(std::move(b), {}, {}, 1, "uniform_width");
}

QuantizerSpec random_boundary_quantizer(double lo, double hi, std::size_t M, Rng& rng) {
  if (M == 0 || !(hi > lo)) {
    throw QuantizerError("random_boundary_quantizer: need M > 0 and hi > lo");
  }
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> b;
  b.reserve(M + 1);
  while (b.size() < M - 1) {
    const double v = u(rng);
    if (v > lo && v < hi) b.push_back(v);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  while (b.size() < M - 1) {  // duplicate draw, astronomically rare
    const double v = u(rng);
    if (v > lo && v < hi && !std::binary_search(b.begin(), b.end(), v)) {
      b.insert(std::upper_bound(b.begin(), b.end(), v), v);
    }
  }
  b.insert(b.begin(), lo);
  b.push_back(hi);
  return QuantizerSpec(std::move(b), {}, {}, 1, "random_boundary");
}

PiecewisePdf scenario_pdf(const Scenario& s) {
  return population_pdf(s.param_spec(), s.bounds());
}

QuantizerSpec build_quantizer(const Scenario& s, const PiecewisePdf& pdf) {
  return build_quantizer(s, pdf, s.quantizer);
}

QuantizerSpec build_quantizer(const Scenario& s, const PiecewisePdf& pdf, QuantizerKind kind) {
  switch (kind) {
    case QuantizerKind::Meb:
      if (s.spec_kind == ParamKind::Case2Composite) {
        return build_case2(pdf, s.M);
      }
      return build_case1(pdf.hi(), s.M);
    case QuantizerKind::UniformWidth:
      return uniform_width_quantizer(pdf.lo(), pdf.hi(), s.M);
    case QuantizerKind::Random: {
      Rng rng = RngStreams(s.seed).stream("random_boundaries");
      return random_boundary_quantizer(pdf.lo(), pdf.hi(), s.M, rng);
    }
  }
  throw QuantizerError("unknown quantizer kind");
}

OfflineArtifacts run_offline(const Scenario& s) {
  const PiecewisePdf pdf = scenario_pdf(s);
  return run_offline(s, build_quantizer(s, pdf));
}

OfflineArtifacts run_offline(const Scenario& s, const QuantizerSpec& spec) {
  const RngStreams streams(s.seed);
  const CompositeParamSpec ps = s.param_spec();
  const PopulationBounds bounds = s.bounds();
  OfflineArtifacts out{spec, Whitelist{}, {}};
  out.devices.reserve(s.population);
  for (std::size_t i = 0; i < s.population; ++i) {
    Rng prng = streams.stream("population", i);
    Device d;
    d.profile = sample_profile(bounds, prng, "ed-" + std::to_string(i));
    d.a_true = composite_a(d.profile, ps);
    Rng rrng = streams.stream("registration", i);
    const Observation reg =
        register_offline(d.profile, ps, s.registration_sigma, s.registration_samples, rrng);
    d.record = out.whitelist.register_device(spec, reg.a_hat, d.profile.device_id,
                                             static_cast<double>(i));
    out.devices.push_back(std::move(d));
  }
  return out;
}

double expected_collisions(const std::vector<double>& masses, std::size_t n) {
  double occupied = 0.0;
  for (double p : masses) {
    occupied += -std::expm1(static_cast<double>(n) * std::log1p(-p));
  }
  return static_cast<double>(n) - occupied;
}

nlohmann::json MetricsReport::to_json() const {
  return {{"rounds", rounds},
          {"legit_rounds", legit_rounds},
          {"attacker_rounds", attacker_rounds},
          {"accepts", accepts},
          {"step1_rejects", step1_rejects},
          {"step2_rejects", step2_rejects},
          {"unknown_id", unknown_id},
          {"correct", correct},
          {"correct_step1", correct_step1},
          {"legit_rejected", legit_rejected},
          {"attacker_step2_reached", attacker_step2_reached},
          {"attacker_step2_rejected", attacker_step2_rejected},
          {"cap", cap},
          {"cap_step1", cap_step1},
          {"far", far},
          {"r_d_empirical", r_d_empirical}};
}

namespace {

std::vector<double> draw_samples(double a, double sigma, std::size_t n, Rng& rng) {
  std::vector<double> y(n, a);
  if (sigma > 0.0) {
    std::normal_distribution<double> g(0.0, sigma);
    for (auto& v : y) v += g(rng);
  }
  return y;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

AuthConfig auth_config(const Scenario& s) {
  AuthConfig cfg;
  cfg.test.rho = s.rho;
  cfg.step2_enabled = s.step2;
  if (s.test == StepTest::GLRT) {
    cfg.glrt_threshold = glrt_threshold(s.n_s, s.rho);
  }
  return cfg;
}

bool passes_step1(AuthDecision d) {
  return d == AuthDecision::Accept || d == AuthDecision::RejectStep2;
}

}  // namespace

MetricsReport run_online(const Scenario& s, const OfflineArtifacts& off, bool keep_log) {
  const RngStreams streams(s.seed);
  const CompositeParamSpec ps = s.param_spec();
  const PopulationBounds bounds = s.bounds();
  const auto& devs = off.devices;

  std::vector<std::pair<double, std::size_t>> by_a;
  std::set<double> taken;
  for (std::size_t i = 0; i < devs.size(); ++i) {
    by_a.emplace_back(devs[i].record.a_registered, i);
    taken.insert(devs[i].a_true);
  }
  std::sort(by_a.begin(), by_a.end());

  AuthConfig cfg = auth_config(s);
  const double legit_sigma =
      s.noise == NoiseModel::PairSnr ? s.offset_ref / std::sqrt(s.r) : s.sigma;
  const PhyId nobody = phy_id(0.0, off.spec.version());

  MetricsReport rep;
  rep.rounds = s.rounds;
  for (std::size_t k = 0; k < s.rounds; ++k) {
    Rng rr = streams.stream("round", k);
    const bool coin = std::uniform_real_distribution<double>(0.0, 1.0)(rr) < s.attacker_fraction;
    const bool attacker = coin || devs.empty();

    double a = 0.0;
    double sigma = legit_sigma;
    PhyId claimed = nobody;
    std::string who;
    if (!attacker) {
      const auto idx = std::uniform_int_distribution<std::size_t>(0, devs.size() - 1)(rr);
      a = devs[idx].a_true;
      claimed = devs[idx].record.phy_id;
      who = devs[idx].profile.device_id;
      ++rep.legit_rounds;
    } else {
      Rng ar = streams.stream("attacker", k);
      do {
        a = composite_a(sample_profile(bounds, ar), ps);
      } while (taken.count(a) != 0);
      who = "attacker";
      if (!by_a.empty()) {
        auto it = std::lower_bound(by_a.begin(), by_a.end(), std::make_pair(a, std::size_t{0}));
        std::size_t victim;
        if (it == by_a.end()) {
          victim = by_a.back().second;
        } else if (it == by_a.begin()) {
          victim = it->second;
        } else {
          const auto prev = std::prev(it);
          victim = (a - prev->first <= it->first - a) ? prev->second : it->second;
        }
        claimed = devs[victim].record.phy_id;
        if (s.noise == NoiseModel::PairSnr) {
          sigma = std::abs(a - devs[victim].record.a_registered) / std::sqrt(s.r);
        }
      } else if (s.noise == NoiseModel::PairSnr) {
        sigma = legit_sigma;
      }
      ++rep.attacker_rounds;
    }

    Rng nr = streams.stream("noise", k);
    const auto obs = draw_samples(a, sigma, s.n_s, nr);
    if (s.test == StepTest::NP) {
      cfg.test.sigma_known = sigma;
    }
    const AuthOutcome out = two_step_authenticate(claimed, obs, off.whitelist, off.spec, cfg);

    switch (out.decision) {
      case AuthDecision::Accept:
        ++rep.accepts;
        break;
      case AuthDecision::RejectStep1:
        ++rep.step1_rejects;
        break;
      case AuthDecision::RejectStep2:
        ++rep.step2_rejects;
        break;
      case AuthDecision::UnknownId:
        ++rep.unknown_id;
        break;
    }
    const bool accepted = out.decision == AuthDecision::Accept;
    const bool step1 = passes_step1(out.decision);
    if (attacker) {
      rep.correct += accepted ? 0 : 1;
      rep.correct_step1 += step1 ? 0 : 1;
      if (step1 && s.step2) {
        ++rep.attacker_step2_reached;
        rep.attacker_step2_rejected += out.decision == AuthDecision::RejectStep2 ? 1 : 0;
      }
    } else {
      rep.correct += accepted ? 1 : 0;
      rep.correct_step1 += step1 ? 1 : 0;
      rep.legit_rejected += accepted ? 0 : 1;
    }

    if (keep_log) {
      nlohmann::json line = to_json(out);
      line["round"] = k;
      line["role"] = attacker ? "attacker" : "legitimate";
      line["device"] = who;
      line["claimed"] = claimed.hex;
      line["a"] = a;
      line["sigma"] = sigma;
      rep.log.push_back(line.dump());
    }
  }
  rep.cap = ratio(rep.correct, rep.rounds);
  rep.cap_step1 = ratio(rep.correct_step1, rep.rounds);
  rep.far = ratio(rep.legit_rejected, rep.legit_rounds);
  rep.r_d_empirical = ratio(rep.attacker_step2_rejected, rep.attacker_step2_reached);
  return rep;
}

std::vector<CapPoint> run_cap_sweep(const Scenario& base, const std::vector<std::size_t>& populations,
                                    const std::vector<QuantizerKind>& kinds,
                                    const std::vector<std::uint64_t>& seeds) {
  const PiecewisePdf pdf = scenario_pdf(base);
  std::map<QuantizerKind, QuantizerSpec> fixed;
  for (auto k : kinds) {
    if (k != QuantizerKind::Random) fixed.emplace(k, build_quantizer(base, pdf, k));
  }
  std::vector<CapPoint> out;
  for (auto seed : seeds) {
    Scenario s = base;
    s.seed = seed;
    for (auto k : kinds) {
      const QuantizerSpec spec =
          k == QuantizerKind::Random ? build_quantizer(s, pdf, k) : fixed.at(k);
      for (auto n : populations) {
        s.population = n;
        const OfflineArtifacts off = run_offline(s, spec);
        const MetricsReport rep = run_online(s, off, false);
        out.push_back({n, k, seed, rep.cap_step1, rep.cap, rep.far});
      }
    }
  }
  return out;
}

const char* to_string(AttackKind k) {
  switch (k) {
    case AttackKind::Replay:
      return "replay";
    case AttackKind::CloseIqi:
      return "close_iqi";
    case AttackKind::KeyCompromise:
      return "key_compromise";
  }
  return "?";
}

nlohmann::json AttackReport::to_json() const {
  nlohmann::json j = {{"kind", phyauth::to_string(kind)},
                      {"trials", trials},
                      {"rejected", rejected},
                      {"step1_rejects", step1_rejects},
                      {"step2_rejects", step2_rejects},
                      {"rejection_rate", rejection_rate},
                      {"step2_reached", step2_reached},
                      {"step2_rejection_rate", step2_rejection_rate},
                      {"sigma", sigma}};
  if (predicted_step2_rate) j["predicted_step2_rate"] = *predicted_step2_rate;
  if (glrt_rejection_rate) j["glrt_rejection_rate"] = *glrt_rejection_rate;
  if (glrt_predicted_rate) j["glrt_predicted_rate"] = *glrt_predicted_rate;
  if (signature_only_accept_rate) j["signature_only_accept_rate"] = *signature_only_accept_rate;
  return j;
}

namespace {

void tally(AttackReport& r, AuthDecision d) {
  if (d != AuthDecision::Accept) ++r.rejected;
  if (d == AuthDecision::RejectStep1 || d == AuthDecision::UnknownId) ++r.step1_rejects;
  if (passes_step1(d)) ++r.step2_reached;
  if (d == AuthDecision::RejectStep2) ++r.step2_rejects;
}

void finish(AttackReport& r) {
  r.rejection_rate = ratio(r.rejected, r.trials);
  r.step2_rejection_rate = ratio(r.step2_rejects, r.step2_reached);
}

}  // namespace

std::vector<AttackReport> run_attack_suite(const Scenario& s) {
  const RngStreams streams(s.seed);
  const CompositeParamSpec ps = s.param_spec();
  const PopulationBounds bounds = s.bounds();
  const PiecewisePdf pdf = scenario_pdf(s);
  const QuantizerSpec spec = build_quantizer(s, pdf);
  OfflineArtifacts off = run_offline(s, spec);
  if (off.devices.empty()) {
    throw ScenarioError("attack suite needs a non-empty population");
  }
  const double sigma = s.noise == NoiseModel::PairSnr ? s.close_delta / std::sqrt(s.r) : s.sigma;
  AuthConfig cfg = auth_config(s);
  if (s.test == StepTest::NP) cfg.test.sigma_known = sigma;
  const auto& edges = spec.edges();

  // Victim keys and one captured packet each, made on first use.
  std::map<std::size_t, ndn::RsaKey> keys;
  std::map<std::size_t, ndn::DataPacket> captured;
  const ndn::NdnName prefix = ndn::NdnName::from_uri("/iot");
  auto victim_name = [&](std::size_t v, std::uint64_t seq) {
    return ndn::make_phy_name({prefix, off.devices[v].record.phy_id, {"temp"}, seq});
  };
  auto key_name = [&](std::size_t v) {
    return prefix.append(off.devices[v].record.phy_id.hex).append("KEY");
  };
  auto key_of = [&](std::size_t v) -> const ndn::RsaKey& {
    auto it = keys.find(v);
    if (it == keys.end()) {
      it = keys.emplace(v, ndn::RsaKey::generate(s.attack_key_bits)).first;
    }
    return it->second;
  };

  // An attacker whose own a sits at least one victim-interval width away.
  auto far_attacker = [&](std::size_t v, Rng& rng) {
    const auto& rec = off.devices[v].record;
    const double width = edges[rec.interval_index + 1] - edges[rec.interval_index];
    for (;;) {
      const double a = composite_a(sample_profile(bounds, rng), ps);
      if (std::abs(a - rec.a_registered) >= width) return a;
    }
  };

  std::vector<AttackReport> reports;
  const auto n_dev = off.devices.size();

  {
    AttackReport r;
    r.kind = AttackKind::Replay;
    r.sigma = sigma;
    for (std::size_t t = 0; t < s.attack_trials; ++t) {
      Rng rng = streams.stream("attack.replay", t);
      const auto v = std::uniform_int_distribution<std::size_t>(0, n_dev - 1)(rng);
      auto pit = captured.find(v);
      if (pit == captured.end()) {
        ndn::DataPacket p{victim_name(v, 0), ndn::Bytes{'2', '1', '.', '5'}, {}, {}};
        pit = captured.emplace(v, ndn::sign(p, key_of(v), key_name(v))).first;
      }
      const ndn::DataPacket& pkt = pit->second;
      ++r.trials;
      if (!ndn::verify(pkt, key_of(v))) {
        ++r.rejected;
        ++r.step1_rejects;
        continue;
      }
      const double a = far_attacker(v, rng);
      const auto obs = draw_samples(a, sigma, s.n_s, rng);
      const PhyId claimed = ndn::parse_phy_name(pkt.name).phy_id;
      tally(r, two_step_authenticate(claimed, obs, off.whitelist, spec, cfg).decision);
    }
    finish(r);
    reports.push_back(r);
  }

  {
    AttackReport r;
    r.kind = AttackKind::CloseIqi;
    r.sigma = sigma;
    Whitelist wl = off.whitelist;
    const PhyRecord victim = wl.register_device(spec, s.victim_a, "victim",
                                                static_cast<double>(n_dev));
    const double a_att = s.victim_a + s.close_delta;
    const double glrt_b = glrt_threshold(s.n_s, s.rho);
    std::size_t glrt_rej = 0;
    for (std::size_t t = 0; t < s.attack_trials; ++t) {
      Rng rng = streams.stream("attack.close", t);
      const auto obs = draw_samples(a_att, sigma, s.n_s, rng);
      const AuthOutcome o = two_step_authenticate(victim.phy_id, obs, wl, spec, cfg);
      ++r.trials;
      tally(r, o.decision);
      if (passes_step1(o.decision)) {
        const auto y = offsets(victim.a_registered, obs);
        if (glrt_test_with_threshold(y, glrt_b).decision == Decision::H1DifferentDevice) {
          ++glrt_rej;
        }
      }
    }
    finish(r);
    if (sigma > 0.0) {
      const double r_pair = (s.close_delta * s.close_delta) / (sigma * sigma);
      r.predicted_step2_rate = np_diff_rate(r_pair, s.n_s, s.rho);
      r.glrt_predicted_rate = glrt_diff_rate(s.close_delta, sigma, s.n_s, s.rho);
    }
    r.glrt_rejection_rate = ratio(glrt_rej, r.step2_reached);
    reports.push_back(r);
  }

  {
    AttackReport r;
    r.kind = AttackKind::KeyCompromise;
    r.sigma = sigma;
    std::size_t sig_ok = 0;
    for (std::size_t t = 0; t < s.attack_trials; ++t) {
      Rng rng = streams.stream("attack.key", t);
      const auto v = std::uniform_int_distribution<std::size_t>(0, n_dev - 1)(rng);
      // The attacker holds the victim's private key and signs fresh content
      // under the victim's name.
      ndn::DataPacket forged{victim_name(v, t + 1), ndn::Bytes{'9', '9', '.', '9'}, {}, {}};
      forged = ndn::sign(forged, key_of(v), key_name(v));
      ++r.trials;
      const bool sig_valid = ndn::verify(forged, key_of(v));
      sig_ok += sig_valid ? 1 : 0;
      if (!sig_valid) {
        ++r.rejected;
        ++r.step1_rejects;
        continue;
      }
      const double a = far_attacker(v, rng);
      const auto obs = draw_samples(a, sigma, s.n_s, rng);
      const PhyId claimed = ndn::parse_phy_name(forged.name).phy_id;
      tally(r, two_step_authenticate(claimed, obs, off.whitelist, spec, cfg).decision);
    }
    finish(r);
    r.signature_only_accept_rate = ratio(sig_ok, r.trials);
    reports.push_back(r);
  }
  return reports;
}

nlohmann::json OffloadRow::to_json() const {
  auto plan = [](const std::optional<OffloadPlan>& p) -> nlohmann::json {
    if (!p) return nullptr;
    return {{"n_p1", p->n_p1}, {"n_p2", p->n_p2}, {"t1", p->t1}, {"t2", p->t2},
            {"makespan", p->makespan}};
  };
  return {{"key_bits", key_bits},
          {"phi", phi},
          {"host_sign_seconds", host_sign_seconds},
          {"xi_ed", xi_ed},
          {"xi_pi", xi_pi},
          {"xi_laptop", xi_laptop},
          {"deadline", deadline},
          {"all_ed", all_ed},
          {"all_pi", all_pi},
          {"all_pi_feasible", all_pi_feasible},
          {"all_laptop", all_laptop},
          {"all_laptop_feasible", all_laptop_feasible},
          {"opt_pi", plan(opt_pi)},
          {"opt_laptop", plan(opt_laptop)},
          {"note", note}};
}

std::map<int, double> calibrate_signing(const Scenario& s) {
  std::map<int, double> out;
  for (int bits : s.key_bits) {
    if (out.count(bits) == 0) out[bits] = measure_sign_seconds(bits, s.sign_reps);
  }
  return out;
}

std::vector<OffloadRow> run_offload_experiment(const Scenario& s) {
  return run_offload_experiment(s, calibrate_signing(s));
}

std::vector<OffloadRow> run_offload_experiment(const Scenario& s,
                                               const std::map<int, double>& host_seconds) {
  const double host_hz = s.host_freq_hz > 0.0 ? s.host_freq_hz : host_cpu_hz();
  std::vector<OffloadRow> rows;
  for (int bits : s.key_bits) {
    const auto it = host_seconds.find(bits);
    if (it == host_seconds.end()) {
      throw ScenarioError("no host signing time for " + std::to_string(bits) + "-bit keys");
    }
    const double h = it->second;
    const DeviceProfile ed = calibrate_xi(cc2430_profile(), h, host_hz);
    const DeviceProfile pi = calibrate_xi(raspberry_pi_profile(), h, host_hz);
    const DeviceProfile laptop = calibrate_xi(laptop_profile(), h, host_hz);
    for (double phi : s.phis) {
      OffloadRow row;
      row.key_bits = bits;
      row.phi = phi;
      row.host_sign_seconds = h;
      row.xi_ed = *ed.calibrated_xi;
      row.xi_pi = *pi.calibrated_xi;
      row.xi_laptop = *laptop.calibrated_xi;
      row.deadline = s.deadline > 0.0 ? s.deadline : static_cast<double>(s.n_p) * row.xi_ed;
      row.all_ed = static_cast<double>(s.n_p) * row.xi_ed;

      auto problem = [&](const DeviceProfile& mec) {
        OffloadProblem p;
        p.n_p = s.n_p;
        p.b_s = s.b_s;
        p.c_b = s.c_b;
        p.ed = ed;
        p.mec = mec;
        p.phi = phi;
        p.T = row.deadline;
        p.model = s.availability;
        return p;
      };
      const OffloadProblem ppi = problem(pi);
      const OffloadProblem plap = problem(laptop);
      if (phi > 0.0) {
        const OffloadPlan api = evaluate_split(ppi, s.n_p);
        const OffloadPlan alap = evaluate_split(plap, s.n_p);
        row.all_pi = api.makespan;
        row.all_pi_feasible = is_feasible(ppi, api);
        row.all_laptop = alap.makespan;
        row.all_laptop_feasible = is_feasible(plap, alap);
      } else {
        row.all_pi = row.all_laptop = std::numeric_limits<double>::infinity();
      }
      try {
        row.opt_pi = optimize(ppi);
      } catch (const InfeasibleError& e) {
        row.note += std::string("pi: ") + e.what() + "; ";
      }
      try {
        row.opt_laptop = optimize(plap);
      } catch (const InfeasibleError& e) {
        row.note += std::string("laptop: ") + e.what() + "; ";
      }
      if (!row.all_pi_feasible) row.note += "all-pi exceeds busy cap; ";
      if (!row.all_laptop_feasible) row.note += "all-laptop exceeds busy cap; ";
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace phyauth
