// SPDX-License-Identifier: Apache-2.0
//
// One PASS/FAIL line per acceptance criterion, with the measured numbers and
// wall time. Exit status is the number of failures.

#include "oracles.hpp"
#include "phyauth/auth_engine.hpp"
#include "phyauth/harness.hpp"
#include "phyauth/ndn_packet.hpp"
#include "phyauth/ndn_security.hpp"
#include "phyauth/pdf_engine.hpp"
#include "phyauth/quantizer.hpp"
#include "phyauth/scenario.hpp"
#include "rsa_gmp.hpp"

#include <boost/math/distributions/fisher_f.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace phyauth;
namespace ndn = phyauth::ndn;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += " [fail: " + what + "]";
    }
  }
  void note(const std::string& s) { detail += " " + s; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail += std::string(" [exception: ") + e.what() + "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < budget_s, "runtime over " + fmt("%.0f s", budget_s));
  std::printf("%s %d %s:%s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string read_line(const std::string& path) {
  std::ifstream f(path);
  std::string s;
  std::getline(f, s);
  return s;
}

std::string read_all(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// 1. Every MEB interval carries 1/M of the worked-example mass.
Outcome equal_mass() {
  Outcome o;
  const double tm = 5 * kPi / 36, am = 0.04;
  const auto pdf = example_tau_segments(tm, am).pdf;
  for (std::size_t M : {20u, 500u}) {
    const auto spec = build_case2(pdf, M);
    const auto& e = spec.edges();
    double worst = 0.0, h = 0.0;
    // Masses from an independent quadrature of the joint (theta, alpha) law.
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
      const double m = oracle::worked_example_cdf(e[i + 1], tm, am) - oracle::worked_example_cdf(e[i], tm, am);
      worst = std::max(worst, std::abs(m - 1.0 / static_cast<double>(M)));
      if (m > 0) h -= m * std::log2(m);
    }
    const double lib_h = entropy(spec, pdf);
    o.require(spec.interval_count() == M, "interval count");
    o.require(worst < 1e-6, "mass error M=" + std::to_string(M));
    o.require(std::abs(h - std::log2(double(M))) < 1e-6, "entropy M=" + std::to_string(M));
    o.require(std::abs(lib_h - std::log2(double(M))) < 1e-6, "library entropy M=" + std::to_string(M));
    o.note("M=" + std::to_string(M) + " max|mass-1/M|=" + fmt("%.1e", worst) +
           " H-log2M=" + fmt("%.1e", h - std::log2(double(M))));
  }
  return o;
}

// 2. Chi-square of direct Monte Carlo draws against the analytic density.
Outcome product_pdf_fit() {
  Outcome o;
  struct Set {
    double tm, am;
    Subcase expect;
  };
  const Set sets[] = {{5 * kPi / 36, 0.04, Subcase::LowerJoinFirst},
                      {kPi / 12, 0.1, Subcase::UpperJoinFirst},
                      {kPi / 6, 0.0718, Subcase::Equal}};
  std::mt19937_64 rng(20240601);
  for (const auto& s : sets) {
    const auto res = example_tau_segments(s.tm, s.am);
    o.require(res.subcase == s.expect, std::string("subcase ") + to_string(res.subcase));
    std::uniform_real_distribution<double> th(-s.tm, s.tm), al(-s.am, s.am);
    std::vector<double> x(100000);
    for (auto& v : x) {
      const double t = th(rng);
      v = 0.5 + 0.5 * (1.0 + al(rng)) * std::cos(t);
    }
    const int bins = 100;
    std::vector<double> edges;
    for (int k = 0; k <= bins; ++k) edges.push_back(res.pdf.inverse_cdf(double(k) / bins));
    edges.front() = res.pdf.lo();
    edges.back() = res.pdf.hi();
    const auto c = oracle::chi2_gof(x, edges, [&](double v) { return res.pdf.cdf(v); });
    o.require(c.p > 0.01, "chi2 p=" + fmt("%.4f", c.p));
    o.note(std::string(to_string(res.subcase)) + " p=" + fmt("%.3f", c.p));
  }
  return o;
}

// 3. NP closed form against simulation on the (r, rho) grid at N_s = 400.
Outcome np_rate() {
  Outcome o;
  const std::size_t n = 400, trials = 100000;
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (double rho : {0.01, 0.05, 0.1}) {
    double prev_cf = -1.0, prev_mc = -1.0;
    for (double r : {0.01, 0.02, 0.04}) {
      const double a_delta = 1e-4;
      const double sigma = a_delta / std::sqrt(r);
      std::normal_distribution<double> noise(a_delta, sigma);
      std::size_t hits = 0;
      std::vector<double> y(n);
      for (std::size_t t = 0; t < trials; ++t) {
        for (auto& v : y) v = noise(rng);
        if (np_test(y, sigma, a_delta, rho).decision == Decision::H1DifferentDevice) ++hits;
      }
      const double mc = double(hits) / trials;
      const double cf = np_diff_rate(r, n, rho);
      worst = std::max(worst, std::abs(mc - cf));
      o.require(std::abs(mc - cf) <= 0.005,
                "r=" + fmt("%g", r) + " rho=" + fmt("%g", rho) + " mc=" + fmt("%.4f", mc) + " cf=" + fmt("%.4f", cf));
      o.require(cf > prev_cf && mc > prev_mc, "ordering in r at rho=" + fmt("%g", rho));
      prev_cf = cf;
      prev_mc = mc;
    }
  }
  o.note("max|mc-closed|=" + fmt("%.4f", worst));
  return o;
}

// 4. GLRT null law, false alarm and the F(1,1) 5% point.
Outcome glrt_calibration() {
  Outcome o;
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> noise(0.0, 3e-4);
  const double rho = 0.05;
  for (std::size_t n : {8u, 400u}) {
    const std::size_t trials = 20000;
    const double b = glrt_threshold(n, rho);
    std::vector<double> stats(trials), y(n);
    std::size_t alarms = 0;
    for (auto& st : stats) {
      const double offset = 0.37;  // unknown common offset must not matter
      for (auto& v : y) v = offset + noise(rng) - offset;
      const auto t = glrt_test_with_threshold(y, b);
      st = t.statistic;
      if (t.decision == Decision::H1DifferentDevice) ++alarms;
    }
    const boost::math::fisher_f f(1.0, double(n - 1));
    const double p = oracle::ks_pvalue(stats, [&](double v) { return v <= 0 ? 0.0 : boost::math::cdf(f, v); });
    const double fa = double(alarms) / trials;
    o.require(p > 0.01, "KS N=" + std::to_string(n) + " p=" + fmt("%.4f", p));
    o.require(std::abs(fa - rho) <= 3 * oracle::binomial_sigma(rho, trials),
              "false alarm N=" + std::to_string(n) + " " + fmt("%.4f", fa));
    o.note("N=" + std::to_string(n) + " KS p=" + fmt("%.3f", p) + " FA=" + fmt("%.4f", fa));
  }
  const double b2 = glrt_threshold(2, 0.05);
  o.require(std::abs(b2 / 161.45 - 1.0) < 0.005, "F(1,1) point " + fmt("%.3f", b2));
  o.note("b(2,0.05)=" + fmt("%.3f", b2));
  return o;
}

// 5. CAP sweep over ten seeds.
Outcome cap_sweep() {
  Outcome o;
  const Scenario base = load_scenario(std::string(PHYAUTH_SCENARIO_DIR) + "/cap.ini");
  o.require(base.M == 2000 && base.rho == 0.01 && base.n_s == 512 && base.r == 0.03, "cap.ini settings");
  const std::vector<std::size_t> pops{50, 100, 200, 500, 1000, 2000};
  const std::vector<QuantizerKind> kinds{QuantizerKind::Meb, QuantizerKind::UniformWidth, QuantizerKind::Random};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t k = 1; k <= 10; ++k) seeds.push_back(base.seed + k);
  const auto pts = run_cap_sweep(base, pops, kinds, seeds);

  auto mean = [&](std::size_t pop, QuantizerKind q, bool step1) {
    double s = 0.0;
    int c = 0;
    for (const auto& p : pts) {
      if (p.population == pop && p.quantizer == q) {
        s += step1 ? p.cap_step1 : p.cap;
        ++c;
      }
    }
    return s / c;
  };

  double min_small = 1.0;
  for (const auto& p : pts) {
    if (p.quantizer == QuantizerKind::Meb && p.population <= 200) min_small = std::min(min_small, p.cap_step1);
    if (p.quantizer == QuantizerKind::Meb && p.population == 2000) {
      o.require(p.cap >= p.cap_step1, "step1&2 below step1 at n=2000 seed " + std::to_string(p.seed));
    }
  }
  o.require(min_small > 0.93, "MEB step-1 CAP " + fmt("%.4f", min_small));
  o.note("min MEB step1 CAP(n<=200)=" + fmt("%.4f", min_small));

  // Orderings on the ten-seed means; the seeds share populations and noise.
  for (std::size_t pop : pops) {
    for (bool step1 : {true, false}) {
      const double m = mean(pop, QuantizerKind::Meb, step1), u = mean(pop, QuantizerKind::UniformWidth, step1),
                   r = mean(pop, QuantizerKind::Random, step1);
      o.require(m >= u && u >= r, std::string(step1 ? "step1" : "full") + " ordering at n=" + std::to_string(pop) +
                                      " " + fmt("%.4f", m) + "/" + fmt("%.4f", u) + "/" + fmt("%.4f", r));
    }
  }
  const double f2000 = mean(2000, QuantizerKind::Meb, false), s2000 = mean(2000, QuantizerKind::Meb, true);
  o.require(f2000 >= s2000, "mean step1&2 below step1 at n=2000");
  o.note("n=2000 MEB step1=" + fmt("%.4f", s2000) + " step1&2=" + fmt("%.4f", f2000) +
         " uniform=" + fmt("%.4f", mean(2000, QuantizerKind::UniformWidth, true)) +
         " random=" + fmt("%.4f", mean(2000, QuantizerKind::Random, true)));
  return o;
}

// Makespan of an integer split from the model definitions, or nullopt when
// the split breaks the busy cap or the deadline.
std::optional<double> split_makespan(long n1, long np, double xi_ed, double xi_mec, double phi, double T,
                                     AvailabilityModel model) {
  const double slack = 1.0 + 1e-9;
  const double busy = double(n1) * xi_mec;
  if (n1 > 0 && (phi <= 0.0 || busy > phi * T * slack)) return std::nullopt;
  const double t1 = n1 == 0 ? 0.0 : (model == AvailabilityModel::TimeShared ? busy / phi : busy);
  const double t2 = double(np - n1) * xi_ed;
  if (t2 > T * slack) return std::nullopt;
  return std::max(t1, t2);
}

// 6. Offload optimum against exhaustive search, with the ordering checks.
Outcome offload() {
  Outcome o;
  const Scenario s = load_scenario(std::string(PHYAUTH_SCENARIO_DIR) + "/offload.ini");
  const auto rows = run_offload_experiment(s);
  o.require(rows.size() == s.key_bits.size() * s.phis.size(), "row count");
  int checked = 0;
  for (const auto& row : rows) {
    const std::string tag = std::to_string(row.key_bits) + "/" + fmt("%g", row.phi);
    for (int which = 0; which < 2; ++which) {
      const auto& plan = which == 0 ? row.opt_pi : row.opt_laptop;
      const double xi_mec = which == 0 ? row.xi_pi : row.xi_laptop;
      const double all_mec = which == 0 ? row.all_pi : row.all_laptop;
      std::optional<double> best;
      for (long n1 = 0; n1 <= s.n_p; ++n1) {
        const auto m = split_makespan(n1, s.n_p, row.xi_ed, xi_mec, row.phi, row.deadline, s.availability);
        if (m && (!best || *m < *best)) best = m;
      }
      const std::string dev = which == 0 ? " pi" : " laptop";
      o.require(plan.has_value() == best.has_value(), "feasibility " + tag + dev);
      if (!plan || !best) continue;
      ++checked;
      o.require(std::abs(plan->makespan - *best) <= 1e-12 * *best, "optimum " + tag + dev);
      if (row.phi == 1.0) o.require(plan->n_p1 == s.n_p, "phi=1 not all-MEC " + tag + dev);
      if (row.phi == 0.025) {
        o.require(plan->makespan < row.all_ed && plan->makespan < all_mec, "phi=0.025 ordering " + tag + dev);
      }
    }
  }
  o.note(std::to_string(checked) + " plans match exhaustive search");
  for (const auto& row : rows) {
    if (row.phi == 0.025 && row.key_bits == 2048 && row.opt_laptop) {
      o.note("2048/0.025 laptop n1=" + std::to_string(row.opt_laptop->n_p1) + " makespan=" +
             fmt("%.3g", row.opt_laptop->makespan) + " vs ED " + fmt("%.3g", row.all_ed) + " MEC " +
             fmt("%.3g", row.all_laptop));
    }
  }
  return o;
}

// 7. Replay, close-pair and key-compromise attackers.
Outcome attacks() {
  Outcome o;
  const Scenario s = load_scenario(std::string(PHYAUTH_SCENARIO_DIR) + "/attacks.ini");
  o.require(s.attack_trials >= 10000, "trial count");
  const auto reps = run_attack_suite(s);
  for (const auto& r : reps) {
    switch (r.kind) {
      case AttackKind::Replay:
        o.require(r.rejection_rate >= 0.99, "replay " + fmt("%.4f", r.rejection_rate));
        o.note("replay=" + fmt("%.4f", r.rejection_rate));
        break;
      case AttackKind::CloseIqi:
        o.require(r.predicted_step2_rate.has_value(), "close-pair prediction");
        if (r.predicted_step2_rate) {
          o.require(std::abs(r.step2_rejection_rate - *r.predicted_step2_rate) <= 0.01,
                    "close-pair " + fmt("%.4f", r.step2_rejection_rate) + " vs " + fmt("%.4f", *r.predicted_step2_rate));
          o.note("close-pair step2=" + fmt("%.4f", r.step2_rejection_rate) + " predicted=" +
                 fmt("%.4f", *r.predicted_step2_rate));
        }
        break;
      case AttackKind::KeyCompromise:
        o.require(r.rejection_rate >= 0.99, "key compromise " + fmt("%.4f", r.rejection_rate));
        o.require(r.signature_only_accept_rate && *r.signature_only_accept_rate == 1.0, "signature-only baseline");
        o.note("key-compromise=" + fmt("%.4f", r.rejection_rate) +
               " signature-only accepts=" + fmt("%.4f", r.signature_only_accept_rate.value_or(-1)));
        break;
    }
  }
  o.require(reps.size() == 3, "three attack kinds");
  return o;
}

ndn::NdnName random_name(std::mt19937_64& rng) {
  std::vector<ndn::Bytes> comps(1 + rng() % 6);
  for (auto& c : comps) {
    c.resize(1 + rng() % 24);
    for (auto& b : c) b = static_cast<std::uint8_t>(rng());
  }
  return ndn::NdnName(std::move(comps));
}

// 8. Wire round trips, golden files, and GMP cross-checks of signatures.
Outcome wire_format() {
  Outcome o;
  std::mt19937_64 rng(8);
  int bad = 0;
  for (int t = 0; t < 10000; ++t) {
    ndn::DataPacket d{random_name(rng), ndn::Bytes(rng() % 200), {}, {}};
    for (auto& b : d.content) b = static_cast<std::uint8_t>(rng());
    if (rng() % 2) {
      d.key_locator = random_name(rng);
      d.signature_value = ndn::Bytes(1 + rng() % 512);
      for (auto& b : *d.signature_value) b = static_cast<std::uint8_t>(rng());
    }
    const auto wd = ndn::encode(d);
    const auto back = ndn::decode_data(wd);
    if (!(back == d) || ndn::encode(back) != wd) ++bad;

    ndn::InterestPacket i{random_name(rng), {}};
    for (auto& b : i.nonce) b = static_cast<std::uint8_t>(rng());
    const auto wi = ndn::encode(i);
    const auto bi = ndn::decode_interest(wi);
    if (!(bi == i) || ndn::encode(bi) != wi) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " round-trip mismatches");
  o.note("20000 packets round-tripped");

  const std::string g = PHYAUTH_GOLDEN_DIR;
  o.require(ndn::to_hex(ndn::encode(ndn::DataPacket{ndn::NdnName::from_uri("/iot/abc"), {'h', 'i'}, {}, {}})) ==
                read_line(g + "/data_unsigned.hex"),
            "golden data");
  o.require(ndn::to_hex(ndn::encode(ndn::InterestPacket{ndn::NdnName::from_uri("/iot/temp"),
                                                        {0xde, 0xad, 0xbe, 0xef, 0, 1, 2, 3}})) ==
                read_line(g + "/interest.hex"),
            "golden interest");
  const auto key = ndn::RsaKey::from_private_pem(read_all(g + "/test_key.pem"));
  const auto signed_hex = read_line(g + "/data_signed.hex");
  const auto golden = ndn::decode_data(ndn::from_hex(signed_hex));
  o.require(ndn::verify(golden, key), "golden signature");
  const ndn::DataPacket bare{golden.name, golden.content, {}, {}};
  o.require(ndn::to_hex(ndn::encode(ndn::sign(bare, key, *golden.key_locator))) == signed_hex, "golden re-sign");
  const auto gk = gmp_rsa::extract(key);
  o.require(gmp_rsa::verify(gk, ndn::signed_portion(golden), *golden.signature_value), "golden under GMP");

  int interop = 0;
  for (int bits : {1024, 2048}) {
    const auto k = ndn::RsaKey::generate(bits);
    const auto gkey = gmp_rsa::extract(k);
    for (int t = 0; t < 10; ++t) {
      ndn::DataPacket p{random_name(rng), ndn::Bytes(rng() % 300, 0x5a), {}, {}};
      const auto sp = ndn::sign(p, k, ndn::NdnName::from_uri("/iot/KEY"));
      const auto covered = ndn::signed_portion(p);
      o.require(gmp_rsa::verify(gkey, covered, *sp.signature_value), "OpenSSL->GMP");
      ndn::DataPacket q = p;
      q.key_locator = ndn::NdnName::from_uri("/iot/KEY");
      q.signature_value = gmp_rsa::sign(gkey, covered);
      o.require(ndn::verify(q, k), "GMP->OpenSSL");
      q.content.push_back(0);
      o.require(!ndn::verify(q, k), "tampered packet accepted");
      interop += 2;
    }
  }
  o.note(std::to_string(interop) + " cross-implementation checks");
  return o;
}

}  // namespace

int main() {
  run(1, "equal-mass quantizer", 10, equal_mass);
  run(2, "product pdf goodness of fit", 30, product_pdf_fit);
  run(3, "NP differentiation rate", 60, np_rate);
  run(4, "GLRT calibration", 60, glrt_calibration);
  run(5, "correct authentication probability", 300, cap_sweep);
  run(6, "offload optimality", 120, offload);
  run(7, "attack suite", 120, attacks);
  run(8, "wire format", 30, wire_format);
  return failures;
}
