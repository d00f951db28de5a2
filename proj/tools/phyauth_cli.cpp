// SPDX-License-Identifier: Apache-2.0
//
// phyauth: experiment tables for the PHY-ID authentication stack.
// Exit codes: 0 ok, 1 scenario or usage error, 2 infeasible / validation failure.

#include "phyauth/auth_engine.hpp"
#include "phyauth/harness.hpp"
#include "phyauth/ndn_packet.hpp"
#include "phyauth/ndn_security.hpp"
#include "phyauth/offload.hpp"
#include "phyauth/quantizer.hpp"
#include "phyauth/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/version.hpp>
#include <openssl/opensslv.h>
#include <openssl/sha.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#ifndef PHYAUTH_VERSION
#define PHYAUTH_VERSION "0.0.0"
#endif

using namespace phyauth;
using nlohmann::json;

namespace {

struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string scenario_path;
  std::string out = "-";
  std::string manifest;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
};

std::string sha256_hex(const std::string& s) {
  unsigned char d[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(s.data()), s.size(), d);
  std::ostringstream o;
  for (unsigned char c : d) o << std::hex << std::setw(2) << std::setfill('0') << int(c);
  return o.str();
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

Scenario load(const Common& c) {
  Scenario s = c.scenario_path.empty() ? Scenario{} : load_scenario(c.scenario_path);
  if (c.seed) s.seed = *c.seed;
  return s;
}

void emit(const Common& c, const std::string& body) {
  if (c.out == "-") {
    std::cout << body;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw std::runtime_error("cannot write " + c.out);
  f << body;
}

void write_manifest(const Common& c, const std::string& sub, const json& config,
                    const std::vector<std::string>& argv) {
  std::string path = c.manifest;
  if (path.empty()) {
    path = c.out == "-" ? "phyauth-" + sub + ".manifest.json" : c.out + ".manifest.json";
  }
  const std::string canon = config.dump();
  json m = {{"tool", "phyauth"},
            {"version", PHYAUTH_VERSION},
            {"subcommand", sub},
            {"argv", argv},
            {"config", config},
            {"config_sha256", sha256_hex(canon)},
            {"output", c.out},
            {"format", c.format},
            {"compiler", __VERSION__},
            {"openssl", OPENSSL_VERSION_TEXT},
            {"boost", BOOST_LIB_VERSION}};
  if (config.contains("seed")) m["seed"] = config["seed"];
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write manifest " + path);
  f << m.dump(2) << "\n";
}

std::string csv_from(const std::string& schema, const std::vector<std::string>& cols,
                     const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream o;
  o << "# schema: " << schema << "\n";
  for (std::size_t i = 0; i < cols.size(); ++i) o << (i ? "," : "") << cols[i];
  o << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << r[i];
    o << "\n";
  }
  return o.str();
}

std::string json_from(const std::vector<std::string>& cols,
                      const std::vector<std::vector<std::string>>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json o;
    for (std::size_t i = 0; i < cols.size(); ++i) o[cols[i]] = r[i];
    arr.push_back(o);
  }
  return arr.dump(2) + "\n";
}

std::string table(const Common& c, const std::string& schema, const std::vector<std::string>& cols,
                  const std::vector<std::vector<std::string>>& rows) {
  return c.format == "json" ? json_from(cols, rows) : csv_from(schema, cols, rows);
}

std::vector<std::string> split(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

QuantizerKind parse_kind(const std::string& k) {
  if (k == "meb") return QuantizerKind::Meb;
  if (k == "uniform") return QuantizerKind::UniformWidth;
  if (k == "random") return QuantizerKind::Random;
  throw ScenarioError("unknown quantizer kind '" + k + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot open " + path);
  std::stringstream b;
  b << f.rdbuf();
  return b.str();
}

// Small end-to-end checks with known answers.
int selftest(std::ostream& log) {
  int failed = 0;
  auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    log << (ok ? "ok   " : "FAIL ") << name << "  " << detail << "\n";
    failed += ok ? 0 : 1;
  };

  {
    const auto pdf = population_pdf(CompositeParamSpec::worked_example(),
                                    {5.0 * std::numbers::pi / 36.0, 0.04});
    const auto spec = build_case2(pdf, 20);
    double worst = 0.0;
    for (double m : interval_masses(spec, pdf)) worst = std::max(worst, std::abs(m - 0.05));
    check("equal-mass intervals, M=20", worst < 1e-6, "max |mass - 1/M| = " + fmt(worst));
    const double h = entropy(spec, pdf);
    check("entropy, M=20", std::abs(h - std::log2(20.0)) < 1e-6, fmt(h));
  }
  {
    const double b = glrt_threshold(2, 0.05);
    check("F(1,1) 5% point", std::abs(b / 161.4476 - 1.0) < 5e-3, fmt(b));
    const double rd = np_diff_rate(0.04, 400, 0.05);
    check("NP differentiation rate r=0.04", std::abs(rd - 0.99074) < 1e-4, fmt(rd));
  }
  {
    Rng rng(7);
    int bad = 0;
    for (int i = 0; i < 200; ++i) {
      ndn::DataPacket p;
      p.name = ndn::NdnName::from_uri("/iot/n" + std::to_string(i));
      p.content.resize(rng() % 64);
      for (auto& b : p.content) b = static_cast<std::uint8_t>(rng());
      if (ndn::decode_data(ndn::encode(p)) != p) ++bad;
    }
    check("packet round trip x200", bad == 0, std::to_string(bad) + " mismatches");
    const auto key = ndn::RsaKey::generate(1024);
    ndn::DataPacket p{ndn::NdnName::from_uri("/iot/x"), {1, 2, 3}, {}, {}};
    const auto signed_p = ndn::sign(p, key, ndn::NdnName::from_uri("/iot/KEY"));
    auto tampered = signed_p;
    tampered.content[0] ^= 1;
    check("sign/verify", ndn::verify(signed_p, key) && !ndn::verify(tampered, key), "");
  }
  {
    bool all = true;
    for (double phi : {1.0, 0.3, 0.025}) {
      OffloadProblem p;
      p.ed = cc2430_profile();
      p.mec = laptop_profile();
      p.phi = phi;
      p.T = 10.0 * p.ed.xi(1.0, 1.0);
      p.model = AvailabilityModel::TimeShared;
      const auto best = optimize(p);
      double brute = INFINITY;
      for (long n1 = 0; n1 <= p.n_p; ++n1) {
        const auto plan = evaluate_split(p, n1);
        if (is_feasible(p, plan)) brute = std::min(brute, plan.makespan);
      }
      all = all && best.makespan == brute;
    }
    check("offload optimum equals brute force", all, "");
  }
  return failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phyauth: PHY-ID authentication experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PHYAUTH_VERSION);
  const std::vector<std::string> args(argv, argv + argc);

  Common common;
  auto add_common = [&](CLI::App* sub, bool scenario) {
    if (scenario) {
      sub->add_option("-s,--scenario", common.scenario_path, "scenario file")
          ->check(CLI::ExistingFile);
      sub->add_option("--seed", common.seed, "override the scenario seed");
    }
    sub->add_option("-o,--out", common.out, "output path, - for stdout");
    sub->add_option("--manifest", common.manifest, "manifest path (default <out>.manifest.json)");
    sub->add_option("--format", common.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  // boundaries
  auto* bnd = app.add_subcommand("boundaries", "MEB / uniform / random boundary table");
  std::size_t b_M = 20;
  double b_theta = 5.0 * std::numbers::pi / 36.0, b_alpha = 0.04;
  std::uint64_t b_seed = 1;
  bnd->add_option("--M", b_M, "intervals")->check(CLI::PositiveNumber);
  bnd->add_option("--theta-m", b_theta, "phase bound, radians");
  bnd->add_option("--alpha-m", b_alpha, "amplitude bound");
  bnd->add_option("--seed", b_seed, "seed for the random baseline");
  add_common(bnd, false);

  // diffrate
  auto* dr = app.add_subcommand("diffrate", "step-2 differentiation rate versus rho");
  std::size_t d_ns = 400;
  std::string d_r = "0.01,0.02,0.04", d_test = "np,glrt",
              d_rho = "0.001,0.002,0.005,0.01,0.02,0.05,0.1,0.2,0.3,0.5";
  dr->add_option("--Ns", d_ns, "samples per test")->check(CLI::Range(2, 1 << 24));
  dr->add_option("--r", d_r, "comma list of offset SNRs");
  dr->add_option("--test", d_test, "comma list: np, glrt");
  dr->add_option("--rho", d_rho, "comma list of false-alarm rates");
  add_common(dr, false);

  // cap
  auto* cap = app.add_subcommand("cap", "correct authentication probability sweep");
  std::string c_pops = "50,100,200,500,1000,2000", c_kinds = "meb,uniform,random";
  std::size_t c_seeds = 10;
  std::string c_log;
  cap->add_option("--populations", c_pops, "comma list of population sizes");
  cap->add_option("--quantizers", c_kinds, "comma list: meb, uniform, random");
  cap->add_option("--seeds", c_seeds, "seeds per point (scenario seed, +1, ...)")
      ->check(CLI::PositiveNumber);
  cap->add_option("--log", c_log, "also run the scenario once and write its JSON-lines round log");
  add_common(cap, true);

  // offload
  auto* off = app.add_subcommand("offload", "signing offload timing table");
  add_common(off, true);

  // attacks
  auto* att = app.add_subcommand("attacks", "replay / close-IQI / key-compromise suite");
  add_common(att, true);

  // packet
  auto* pkt = app.add_subcommand("packet", "packet encode/decode/sign/verify debugging");
  pkt->require_subcommand(1);
  std::string p_name, p_content, p_hex, p_key, p_key_name = "/iot/KEY";
  int p_bits = 2048;
  auto* p_enc = pkt->add_subcommand("encode", "encode a data packet to hex");
  p_enc->add_option("--name", p_name, "name URI")->required();
  p_enc->add_option("--content", p_content, "content text");
  auto* p_dec = pkt->add_subcommand("decode", "decode hex to JSON");
  p_dec->add_option("--hex", p_hex, "wire bytes as hex")->required();
  auto* p_sign = pkt->add_subcommand("sign", "sign a data packet with a PEM private key");
  p_sign->add_option("--name", p_name, "name URI")->required();
  p_sign->add_option("--content", p_content, "content text");
  p_sign->add_option("--key", p_key, "private key PEM file")->required()->check(CLI::ExistingFile);
  p_sign->add_option("--key-name", p_key_name, "key locator name");
  auto* p_ver = pkt->add_subcommand("verify", "verify hex-encoded data with a PEM public key");
  p_ver->add_option("--hex", p_hex, "wire bytes as hex")->required();
  p_ver->add_option("--key", p_key, "public key PEM file")->required()->check(CLI::ExistingFile);
  auto* p_gen = pkt->add_subcommand("keygen", "write a fresh RSA key pair as PEM");
  p_gen->add_option("--bits", p_bits, "key size")->check(CLI::Range(1024, 4096));
  for (auto* s : {p_enc, p_dec, p_sign, p_ver, p_gen}) {
    s->add_option("-o,--out", common.out, "output path, - for stdout");
    s->add_option("--manifest", common.manifest, "manifest path");
  }

  auto* st = app.add_subcommand("selftest", "known-answer checks");
  st->add_option("--manifest", common.manifest, "manifest path");

  app.footer(scenario_help());

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*bnd) {
      const Scenario sc = [&] {
        Scenario s;
        s.theta_m = b_theta;
        s.alpha_m = b_alpha;
        s.M = b_M;
        s.seed = b_seed;
        return s;
      }();
      const auto pdf = scenario_pdf(sc);
      const auto meb = build_quantizer(sc, pdf, QuantizerKind::Meb);
      const auto uni = build_quantizer(sc, pdf, QuantizerKind::UniformWidth);
      const auto rnd = build_quantizer(sc, pdf, QuantizerKind::Random);
      std::vector<std::vector<std::string>> rows;
      for (std::size_t m = 0; m <= b_M; ++m) {
        rows.push_back({std::to_string(m), fmt(meb.boundaries()[m]), fmt(uni.boundaries()[m]),
                        fmt(rnd.boundaries()[m]), fmt(pdf.cdf(meb.boundaries()[m]))});
      }
      emit(common, table(common, "boundaries/1", {"m", "meb", "uniform", "random", "meb_cdf"}, rows));
      write_manifest(common, "boundaries",
                     {{"M", b_M}, {"theta_m", b_theta}, {"alpha_m", b_alpha}, {"seed", b_seed}}, args);
    } else if (*dr) {
      std::vector<std::vector<std::string>> rows;
      for (const auto& test : split(d_test)) {
        if (test != "np" && test != "glrt") throw ScenarioError("unknown test '" + test + "'");
        for (const auto& rs : split(d_r)) {
          const double r = std::stod(rs);
          for (const auto& ps : split(d_rho)) {
            const double rho = std::stod(ps);
            const double rd = test == "np" ? np_diff_rate(r, d_ns, rho)
                                           : glrt_diff_rate(std::sqrt(r), 1.0, d_ns, rho);
            rows.push_back({test, fmt(r), fmt(rho), fmt(rd)});
          }
        }
      }
      emit(common, table(common, "diffrate/1", {"test", "r", "rho", "r_d"}, rows));
      write_manifest(common, "diffrate", {{"Ns", d_ns}, {"r", d_r}, {"test", d_test}, {"rho", d_rho}},
                     args);
    } else if (*cap) {
      const Scenario s = load(common);
      std::vector<std::size_t> pops;
      for (const auto& p : split(c_pops)) pops.push_back(std::stoul(p));
      std::vector<QuantizerKind> kinds;
      for (const auto& k : split(c_kinds)) kinds.push_back(parse_kind(k));
      std::vector<std::uint64_t> seeds;
      for (std::size_t i = 0; i < c_seeds; ++i) seeds.push_back(s.seed + i);
      const auto pts = run_cap_sweep(s, pops, kinds, seeds);
      std::vector<std::vector<std::string>> rows;
      for (const auto& p : pts) {
        rows.push_back({std::to_string(p.population), to_string(p.quantizer), std::to_string(p.seed),
                        fmt(s.attacker_fraction), fmt(p.cap_step1), fmt(p.cap), fmt(p.far)});
      }
      emit(common, table(common, "cap/1",
                         {"population", "quantizer", "seed", "attacker_fraction", "cap_step1",
                          "cap", "far"},
                         rows));
      if (!c_log.empty()) {
        const auto offa = run_offline(s);
        const auto rep = run_online(s, offa, true);
        std::ofstream f(c_log);
        for (const auto& line : rep.log) f << line << "\n";
        std::cerr << rep.to_json().dump() << "\n";
      }
      json cfg = to_json(s);
      cfg["populations"] = c_pops;
      cfg["quantizers"] = c_kinds;
      cfg["seeds"] = c_seeds;
      write_manifest(common, "cap", cfg, args);
    } else if (*off) {
      const Scenario s = load(common);
      const auto rows_in = run_offload_experiment(s);
      std::vector<std::vector<std::string>> rows;
      bool infeasible = false;
      auto n1 = [](const std::optional<OffloadPlan>& p) {
        return p ? std::to_string(p->n_p1) : std::string("infeasible");
      };
      auto ms = [](const std::optional<OffloadPlan>& p) {
        return p ? fmt(p->makespan) : std::string("");
      };
      for (const auto& r : rows_in) {
        infeasible = infeasible || !r.opt_pi || !r.opt_laptop;
        rows.push_back({std::to_string(r.key_bits), fmt(r.phi), fmt(r.host_sign_seconds),
                        fmt(r.xi_ed), fmt(r.xi_pi), fmt(r.xi_laptop), fmt(r.deadline),
                        fmt(r.all_ed), fmt(r.all_pi), r.all_pi_feasible ? "1" : "0",
                        fmt(r.all_laptop), r.all_laptop_feasible ? "1" : "0", n1(r.opt_pi),
                        ms(r.opt_pi), n1(r.opt_laptop), ms(r.opt_laptop), "\"" + r.note + "\""});
      }
      emit(common, table(common, "offload/1",
                         {"key_bits", "phi", "host_sign_s", "xi_ed", "xi_pi", "xi_laptop", "T",
                          "all_ed", "all_pi", "all_pi_feasible", "all_laptop",
                          "all_laptop_feasible", "opt_pi_n1", "opt_pi_makespan", "opt_laptop_n1",
                          "opt_laptop_makespan", "note"},
                         rows));
      write_manifest(common, "offload", to_json(s), args);
      if (infeasible) {
        std::cerr << "some configurations have no feasible split\n";
        return 2;
      }
    } else if (*att) {
      const Scenario s = load(common);
      const auto reps = run_attack_suite(s);
      if (common.format == "json") {
        json arr = json::array();
        for (const auto& r : reps) arr.push_back(r.to_json());
        emit(common, arr.dump(2) + "\n");
      } else {
        std::vector<std::vector<std::string>> rows;
        auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(""); };
        for (const auto& r : reps) {
          rows.push_back({to_string(r.kind), std::to_string(r.trials), fmt(r.rejection_rate),
                          std::to_string(r.step1_rejects), std::to_string(r.step2_rejects),
                          std::to_string(r.step2_reached), fmt(r.step2_rejection_rate),
                          opt(r.predicted_step2_rate), opt(r.glrt_rejection_rate),
                          opt(r.glrt_predicted_rate), opt(r.signature_only_accept_rate)});
        }
        emit(common, csv_from("attacks/1",
                              {"kind", "trials", "rejection_rate", "step1_rejects", "step2_rejects",
                               "step2_reached", "step2_rejection_rate", "np_predicted",
                               "glrt_rejection_rate", "glrt_predicted", "signature_only_accept"},
                              rows));
      }
      write_manifest(common, "attacks", to_json(s), args);
    } else if (*pkt) {
      json cfg = {{"name", p_name}, {"content", p_content}, {"hex", p_hex}, {"key", p_key}};
      std::string body;
      if (*p_enc) {
        ndn::DataPacket p{ndn::NdnName::from_uri(p_name), ndn::Bytes(p_content.begin(), p_content.end()),
                          {}, {}};
        body = ndn::to_hex(ndn::encode(p)) + "\n";
      } else if (*p_dec) {
        const auto pk = ndn::decode(ndn::from_hex(p_hex));
        json j;
        if (const auto* d = std::get_if<ndn::DataPacket>(&pk)) {
          j = {{"type", "data"},
               {"name", d->name.to_uri()},
               {"content_hex", ndn::to_hex(d->content)},
               {"signed", d->is_signed()}};
          if (d->key_locator) j["key_locator"] = d->key_locator->to_uri();
          try {
            j["phy_id"] = ndn::parse_phy_name(d->name).phy_id.hex;
          } catch (const std::exception&) {
          }
        } else {
          const auto& i = std::get<ndn::InterestPacket>(pk);
          j = {{"type", "interest"},
               {"name", i.name.to_uri()},
               {"nonce", ndn::to_hex(ndn::Bytes(i.nonce.begin(), i.nonce.end()))}};
        }
        body = j.dump(2) + "\n";
      } else if (*p_sign) {
        const auto key = ndn::RsaKey::from_private_pem(read_file(p_key));
        ndn::DataPacket p{ndn::NdnName::from_uri(p_name), ndn::Bytes(p_content.begin(), p_content.end()),
                          {}, {}};
        body = ndn::to_hex(ndn::encode(ndn::sign(p, key, ndn::NdnName::from_uri(p_key_name)))) + "\n";
      } else if (*p_ver) {
        const auto key = ndn::RsaKey::from_public_pem(read_file(p_key));
        const bool ok = ndn::verify(ndn::decode_data(ndn::from_hex(p_hex)), key);
        emit(common, ok ? "valid\n" : "invalid\n");
        write_manifest(common, "packet", cfg, args);
        return ok ? 0 : 2;
      } else if (*p_gen) {
        const auto key = ndn::RsaKey::generate(p_bits);
        body = key.private_pem() + key.public_pem();
        cfg["bits"] = p_bits;
      }
      emit(common, body);
      write_manifest(common, "packet", cfg, args);
    } else if (*st) {
      const int failed = selftest(std::cout);
      common.out = "-";
      write_manifest(common, "selftest", {{"failed", failed}}, args);
      return failed == 0 ? 0 : 2;
    }
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 1;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const ndn::DecodeError& e) {
    std::cerr << "decode error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
