// SPDX-License-Identifier: Apache-2.0
#include "phyauth/scenario.hpp"

#include <doctest.h>

using namespace phyauth;

TEST_CASE("defaults and a full file") {
  const Scenario d = parse_scenario("");
  CHECK(d.M == 2000);
  CHECK(d.attacker_fraction == 0.5);

  const Scenario s = parse_scenario(R"(
seed = 77
rounds = 10
[population]
size = 3
theta_m = 0.2
alpha_m = "0.05"
spec_kind = case1_theta
[quantizer]
kind = random
M = 8
[test]
kind = glrt
step2 = false
rho = 0.1
Ns = 16
noise_model = absolute
sigma = 1e-3
[attack]
mix = 0.25
[offload]
key_bits = 1024, 2048
phi = 1, 0.5
model = contiguous_window
)");
  CHECK(s.seed == 77);
  CHECK(s.rounds == 10);
  CHECK(s.population == 3);
  CHECK(s.alpha_m == 0.05);
  CHECK(s.spec_kind == ParamKind::Case1Theta);
  CHECK(s.quantizer == QuantizerKind::Random);
  CHECK(s.test == StepTest::GLRT);
  CHECK_FALSE(s.step2);
  CHECK(s.noise == NoiseModel::Absolute);
  CHECK(s.key_bits == std::vector<int>{1024, 2048});
  CHECK(s.phis == std::vector<double>{1.0, 0.5});
  CHECK(s.availability == AvailabilityModel::ContiguousWindow);
  CHECK(to_json(s)["quantizer"]["kind"] == "random");
}

TEST_CASE("typos and bad values are errors") {
  CHECK_THROWS_AS(parse_scenario("sed = 1\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[populaton]\nsize = 1\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[population]\nsizee = 1\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[population]\nsize = -1\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[population]\nsize = ten\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[test]\nrho = 1.5\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[test]\nkind = bayes\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[offload]\nkey_bits = 512\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[quantizer\n"), ScenarioError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/file.ini"), ScenarioError);
  CHECK_NOTHROW(parse_scenario("[attack]\n"));
}

TEST_CASE("shipped scenarios parse") {
  for (const char* f : {"cap.ini", "attacks.ini", "offload.ini"}) {
    CAPTURE(f);
    CHECK_NOTHROW(load_scenario(std::string(PHYAUTH_SCENARIO_DIR) + "/" + f));
  }
}

TEST_CASE("help lists every section") {
  const auto h = scenario_help();
  for (const char* s : {"[population]", "[quantizer]", "[test]", "[attack]", "[offload]", "noise_model"}) {
    CHECK(h.find(s) != std::string::npos);
  }
}
