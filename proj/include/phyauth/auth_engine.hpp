// SPDX-License-Identifier: Apache-2.0
//
// Online two-step authentication: interval comparison against the whitelist,
// then a hypothesis test on the offsets from the registered value.

#pragma once

#include "phyauth/quantizer.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace phyauth {

class AuthError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class Decision { H0SameDevice, H1DifferentDevice };
enum class TestKind { NP, NPUnknownOffset, GLRT };

const char* to_string(Decision d);
const char* to_string(TestKind k);

struct TestResult {
  double statistic = 0.0;
  double threshold = 0.0;
  Decision decision = Decision::H0SameDevice;
  TestKind kind = TestKind::NP;
};

nlohmann::json to_json(const TestResult& r);

struct TestConfig {
  double rho = 0.05;
  std::optional<double> sigma_known;
  std::optional<double> a_delta_known;
};

std::vector<double> offsets(double a_registered, const std::vector<double>& observations);

// With a_delta: L = r sum(y) / (a_delta N), r = a_delta^2 / sigma^2,
// threshold Q^{-1}(rho) sqrt(r / N). The sign of a_delta sets the direction.
// Without a_delta: mean(y) against (sigma / sqrt(N)) Q^{-1}(rho).
TestResult np_test(const std::vector<double>& y, double sigma, std::optional<double> a_delta,
                   double rho);

// Q(sqrt(r N) (b_v / r - 1)).
double np_diff_rate(double r, std::size_t n_s, double rho);

// P(F(1, N-1) > b) = 1 - I_{b/(b+N-1)}(1/2, (N-1)/2).
double glrt_false_alarm(double b, std::size_t n_s);

// Solves glrt_false_alarm(b, N) = rho, relative tolerance 1e-10.
double glrt_threshold(std::size_t n_s, double rho);

// L = (N-1) (sum y)^2 / (N sum (y - mean)^2), H1 when L exceeds the threshold.
TestResult glrt_test(const std::vector<double>& y, double rho);
TestResult glrt_test_with_threshold(const std::vector<double>& y, double threshold);

// Exact power: Poisson mixture over the noncentrality N a_delta^2 / sigma^2.
double glrt_diff_rate(double a_delta, double sigma, std::size_t n_s, double rho);

// The truncated closed-form sum that is often quoted for the same power.
// Kept for comparison; it is biased low (see README).
double glrt_diff_rate_finite_sum(double a_delta, double sigma, std::size_t n_s, double rho);

struct PhyRecord {
  std::string device_id;
  double a_registered = 0.0;
  std::size_t interval_index = 0;
  double level = 0.0;
  double epsilon = 0.0;
  PhyId phy_id;
  double registered_at = 0.0;
};

nlohmann::json to_json(const PhyRecord& r);

// Keyed by PHY-ID. Devices sharing an interval get epsilon = k * epsilon_step
// for the k-th duplicate so keys stay distinct. Readers take a shared lock;
// registration and rebuild are exclusive.
class Whitelist {
public:
  explicit Whitelist(double epsilon_step = 1e-9) : epsilon_step_(epsilon_step) {}
  Whitelist(const Whitelist& other);
  Whitelist& operator=(const Whitelist& other);

  PhyRecord register_device(const QuantizerSpec& spec, double a_registered, std::string device_id,
                            double registered_at = 0.0);
  std::optional<PhyRecord> find(const PhyId& id) const;
  std::optional<PhyRecord> find_device(const std::string& device_id) const;
  std::vector<PhyRecord> records() const;
  std::size_t size() const;
  // Registrations that landed in an already-occupied interval.
  std::size_t collisions() const;
  // Re-quantize every record under a new spec version and re-key.
  void rebuild(const QuantizerSpec& spec);

private:
  PhyRecord make_record(const QuantizerSpec& spec, double a, std::string device_id, double at);

  double epsilon_step_;
  mutable std::shared_mutex mu_;
  std::map<PhyId, PhyRecord> by_id_;
  std::map<std::size_t, std::size_t> occupancy_;
  std::size_t collisions_ = 0;
};

enum class AuthDecision { Accept, RejectStep1, RejectStep2, UnknownId };
const char* to_string(AuthDecision d);

struct AuthConfig {
  TestConfig test;
  bool step2_enabled = true;
  // Cached GLRT threshold for the configured (N, rho); computed on demand if absent.
  std::optional<double> glrt_threshold;
};

struct AuthOutcome {
  AuthDecision decision = AuthDecision::UnknownId;
  std::optional<std::size_t> observed_index;
  std::optional<std::size_t> registered_index;
  std::optional<TestResult> step2;
};

nlohmann::json to_json(const AuthOutcome& o);

// Step 1 quantizes the mean of the observations and compares the interval
// index with the record. Step 2 runs the NP test when sigma is known and the
// GLRT otherwise.
AuthOutcome two_step_authenticate(const PhyId& claimed, const std::vector<double>& observations,
                                  const Whitelist& whitelist, const QuantizerSpec& spec,
                                  const AuthConfig& config);

// After step 2 separated two registered devices that share an interval:
// insert the midpoint sub-boundary and re-key the whitelist under the new
// version. Returns the new spec.
QuantizerSpec separate_registered_pair(Whitelist& whitelist, const QuantizerSpec& spec,
                                       const PhyRecord& a, const PhyRecord& b);

}  // namespace phyauth
