// SPDX-License-Identifier: Apache-2.0

#include "phyauth/auth_engine.hpp"

#include "phyauth/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

namespace phyauth {

const char* to_string(Decision d) {
  return d == Decision::H0SameDevice ? "H0_same_device" : "H1_different_device";
}

const char* to_string(TestKind k) {
  switch (k) {
    case TestKind::NP:
      return "NP";
    case TestKind::NPUnknownOffset:
      return "NP_unknown_offset";
    case TestKind::GLRT:
      return "GLRT";
  }
  return "?";
}

const char* to_string(AuthDecision d) {
  switch (d) {
    case AuthDecision::Accept:
      return "Accept";
    case AuthDecision::RejectStep1:
      return "RejectStep1";
    case AuthDecision::RejectStep2:
      return "RejectStep2";
    case AuthDecision::UnknownId:
      return "UnknownId";
  }
  return "?";
}

nlohmann::json to_json(const TestResult& r) {
  nlohmann::json j;
  j["kind"] = to_string(r.kind);
  j["statistic"] = std::isfinite(r.statistic) ? nlohmann::json(r.statistic) : nlohmann::json("inf");
  j["threshold"] = r.threshold;
  j["decision"] = to_string(r.decision);
  return j;
}

namespace {

void check_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw AuthError("rho must lie in (0, 1)");
  }
}

}  // namespace

std::vector<double> offsets(double a_registered, const std::vector<double>& observations) {
  if (observations.empty()) {
    throw AuthError("offsets: no observations");
  }
  std::vector<double> y(observations.size());
  for (std::size_t k = 0; k < observations.size(); ++k) {
    y[k] = observations[k] - a_registered;
  }
  return y;
}

TestResult np_test(const std::vector<double>& y, double sigma, std::optional<double> a_delta,
                   double rho) {
  if (!(sigma > 0.0)) {
    throw AuthError("np_test: sigma must be positive");
  }
  check_rho(rho);
  if (y.empty()) {
    throw AuthError("np_test: no samples");
  }
  const double n = static_cast<double>(y.size());
  const double sum = std::accumulate(y.begin(), y.end(), 0.0);
  const double qi = numeric::q_inverse(rho);
  TestResult out;
  if (a_delta && *a_delta != 0.0) {
    const double ad = *a_delta;
    const double r = ad * ad / (sigma * sigma);
    out.statistic = r * sum / (ad * n);
    out.threshold = qi * std::sqrt(r / n);
    out.kind = TestKind::NP;
  } else {
    out.statistic = sum / n;
    out.threshold = sigma / std::sqrt(n) * qi;
    out.kind = TestKind::NPUnknownOffset;
  }
  out.decision = out.statistic > out.threshold ? Decision::H1DifferentDevice : Decision::H0SameDevice;
  return out;
}

double np_diff_rate(double r, std::size_t n_s, double rho) {
  if (!(r > 0.0)) {
    throw AuthError("np_diff_rate: r must be positive");
  }
  check_rho(rho);
  const double n = static_cast<double>(n_s);
  const double bv = numeric::q_inverse(rho) * std::sqrt(r / n);
  return numeric::q_function(std::sqrt(r * n) * (bv / r - 1.0));
}

double glrt_false_alarm(double b, std::size_t n_s) {
  if (n_s < 2) {
    throw AuthError("GLRT needs at least two samples");
  }
  if (b <= 0.0) {
    return 1.0;
  }
  const double d2 = static_cast<double>(n_s - 1);
  // 1 - I_x(1/2, d2/2) = I_{1-x}(d2/2, 1/2), evaluated directly to keep small tails accurate.
  return numeric::incomplete_beta(d2 / (b + d2), d2 / 2.0, 0.5);
}

double glrt_threshold(std::size_t n_s, double rho) {
  check_rho(rho);
  if (n_s < 2) {
    throw AuthError("GLRT needs at least two samples");
  }
  auto f = [n_s, rho](double b) { return glrt_false_alarm(b, n_s) - rho; };
  double hi = 1e6;
  while (f(hi) > 0.0) {
    hi *= 10.0;
    if (!std::isfinite(hi)) {
      throw AuthError("glrt_threshold: could not bracket the threshold");
    }
  }
  return numeric::find_root(f, 0.0, hi, 1e-12, 0.0, 500);
}

TestResult glrt_test_with_threshold(const std::vector<double>& y, double threshold) {
  if (y.size() < 2) {
    throw AuthError("glrt_test: at least two samples required");
  }
  const double n = static_cast<double>(y.size());
  const double sum = std::accumulate(y.begin(), y.end(), 0.0);
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : y) {
    ss += (v - mean) * (v - mean);
  }
  TestResult out;
  out.kind = TestKind::GLRT;
  out.threshold = threshold;
  if (ss == 0.0) {
    // Degenerate: identical samples. Only an all-zero offset vector looks like H0.
    out.statistic = (sum == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    out.statistic = (n - 1.0) * sum * sum / (n * ss);
  }
  out.decision = out.statistic > threshold ? Decision::H1DifferentDevice : Decision::H0SameDevice;
  return out;
}

TestResult glrt_test(const std::vector<double>& y, double rho) {
  return glrt_test_with_threshold(y, glrt_threshold(y.size(), rho));
}

double glrt_diff_rate(double a_delta, double sigma, std::size_t n_s, double rho) {
  if (!(sigma > 0.0)) {
    throw AuthError("glrt_diff_rate: sigma must be positive");
  }
  const double b = glrt_threshold(n_s, rho);
  const double d2 = static_cast<double>(n_s - 1);
  const double x_c = d2 / (b + d2);
  const double half_lambda = 0.5 * static_cast<double>(n_s) * a_delta * a_delta / (sigma * sigma);
  if (half_lambda == 0.0) {
    return numeric::incomplete_beta(x_c, d2 / 2.0, 0.5);
  }
  auto weight = [half_lambda](double i) {
    return std::exp(-half_lambda + i * std::log(half_lambda) - std::lgamma(i + 1.0));
  };
  // P(L > b) = sum_i w_i (1 - I_x(1/2 + i, d2/2)) = sum_i w_i I_{1-x}(d2/2, 1/2 + i).
  auto term = [&](double i) { return weight(i) * numeric::incomplete_beta(x_c, d2 / 2.0, 0.5 + i); };
  const double mode = std::floor(half_lambda);
  double total = term(mode);
  for (double i = mode + 1.0;; i += 1.0) {
    const double w = weight(i);
    total += w * numeric::incomplete_beta(x_c, d2 / 2.0, 0.5 + i);
    if (w < 1e-17) {
      break;
    }
  }
  for (double i = mode - 1.0; i >= 0.0; i -= 1.0) {
    const double w = weight(i);
    total += w * numeric::incomplete_beta(x_c, d2 / 2.0, 0.5 + i);
    if (w < 1e-17) {
      break;
    }
  }
  return std::clamp(total, 0.0, 1.0);
}

double glrt_diff_rate_finite_sum(double a_delta, double sigma, std::size_t n_s, double rho) {
  if (!(sigma > 0.0)) {
    throw AuthError("glrt_diff_rate_finite_sum: sigma must be positive");
  }
  const double b = glrt_threshold(n_s, rho);
  const double n = static_cast<double>(n_s);
  const double mu = n * (n - 1.0) * a_delta * a_delta / (2.0 * sigma * sigma * (b + n - 1.0));
  const double x = b / (b + n - 1.0);
  const double yv = (n - 1.0) / (b + n - 1.0);
  const long top = static_cast<long>(n_s) - 2;
  double sum = 0.0;
  for (long i = 0; i <= top; ++i) {
    const double di = static_cast<double>(i);
    const double log_pref = -mu + (mu > 0.0 ? di * std::log(mu) : (i == 0 ? 0.0 : -std::numeric_limits<double>::infinity())) -
                            std::lgamma(di + 1.0) + (di + 1.0) * std::log(x);
    if (log_pref < -745.0) {
      continue;
    }
    double inner = 1.0;
    double t = 1.0;
    for (long k = 1; k <= top - i; ++k) {
      t *= (static_cast<double>(k) + di) / static_cast<double>(k) * yv;
      inner += t;
    }
    sum += std::exp(log_pref) * inner;
  }
  return 1.0 - sum;
}

nlohmann::json to_json(const PhyRecord& r) {
  return {{"device_id", r.device_id},   {"a_registered", r.a_registered},
          {"interval_index", r.interval_index}, {"level", r.level},
          {"epsilon", r.epsilon},       {"phy_id", r.phy_id.hex},
          {"registered_at", r.registered_at}};
}

Whitelist::Whitelist(const Whitelist& other) {
  std::shared_lock lock(other.mu_);
  epsilon_step_ = other.epsilon_step_;
  by_id_ = other.by_id_;
  occupancy_ = other.occupancy_;
  collisions_ = other.collisions_;
}

Whitelist& Whitelist::operator=(const Whitelist& other) {
  if (this != &other) {
    std::unique_lock lock(mu_, std::defer_lock);
    std::shared_lock olock(other.mu_, std::defer_lock);
    std::lock(lock, olock);
    epsilon_step_ = other.epsilon_step_;
    by_id_ = other.by_id_;
    occupancy_ = other.occupancy_;
    collisions_ = other.collisions_;
  }
  return *this;
}

PhyRecord Whitelist::make_record(const QuantizerSpec& spec, double a, std::string device_id,
                                 double at) {
  const auto q = quantize(spec, a);
  std::size_t& occ = occupancy_[q.index];
  PhyRecord rec;
  rec.device_id = std::move(device_id);
  rec.a_registered = a;
  rec.interval_index = q.index;
  rec.level = q.level;
  rec.epsilon = static_cast<double>(occ) * epsilon_step_;
  rec.phy_id = phy_id(q.level, spec.version(), rec.epsilon);
  rec.registered_at = at;
  if (occ > 0) {
    ++collisions_;
  }
  ++occ;
  return rec;
}

PhyRecord Whitelist::register_device(const QuantizerSpec& spec, double a_registered,
                                     std::string device_id, double registered_at) {
  std::unique_lock lock(mu_);
  PhyRecord rec = make_record(spec, a_registered, std::move(device_id), registered_at);
  if (!by_id_.emplace(rec.phy_id, rec).second) {
    throw AuthError("PHY-ID collision after epsilon adjustment");
  }
  return rec;
}

std::optional<PhyRecord> Whitelist::find(const PhyId& id) const {
  std::shared_lock lock(mu_);
  auto it = by_id_.find(id);
  if (it == by_id_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<PhyRecord> Whitelist::find_device(const std::string& device_id) const {
  std::shared_lock lock(mu_);
  for (const auto& [id, rec] : by_id_) {
    if (rec.device_id == device_id) {
      return rec;
    }
  }
  return std::nullopt;
}

std::vector<PhyRecord> Whitelist::records() const {
  std::shared_lock lock(mu_);
  std::vector<PhyRecord> out;
  out.reserve(by_id_.size());
  for (const auto& kv : by_id_) {
    out.push_back(kv.second);
  }
  std::sort(out.begin(), out.end(), [](const PhyRecord& a, const PhyRecord& b) {
    return a.registered_at != b.registered_at ? a.registered_at < b.registered_at
                                              : a.device_id < b.device_id;
  });
  return out;
}

std::size_t Whitelist::size() const {
  std::shared_lock lock(mu_);
  return by_id_.size();
}

std::size_t Whitelist::collisions() const {
  std::shared_lock lock(mu_);
  return collisions_;
}

void Whitelist::rebuild(const QuantizerSpec& spec) {
  std::vector<PhyRecord> old = records();
  std::unique_lock lock(mu_);
  by_id_.clear();
  occupancy_.clear();
  collisions_ = 0;
  for (auto& r : old) {
    PhyRecord rec = make_record(spec, r.a_registered, r.device_id, r.registered_at);
    by_id_.emplace(rec.phy_id, rec);
  }
}

nlohmann::json to_json(const AuthOutcome& o) {
  nlohmann::json j;
  j["decision"] = to_string(o.decision);
  j["observed_index"] = o.observed_index ? nlohmann::json(*o.observed_index) : nlohmann::json();
  j["registered_index"] = o.registered_index ? nlohmann::json(*o.registered_index) : nlohmann::json();
  j["step2"] = o.step2 ? to_json(*o.step2) : nlohmann::json();
  return j;
}

AuthOutcome two_step_authenticate(const PhyId& claimed, const std::vector<double>& observations,
                                  const Whitelist& whitelist, const QuantizerSpec& spec,
                                  const AuthConfig& config) {
  AuthOutcome out;
  const auto rec = whitelist.find(claimed);
  if (!rec) {
    out.decision = AuthDecision::UnknownId;
    return out;
  }
  if (observations.empty()) {
    throw AuthError("two_step_authenticate: no observations");
  }
  const double mean = std::accumulate(observations.begin(), observations.end(), 0.0) /
                      static_cast<double>(observations.size());
  out.observed_index = quantize(spec, mean).index;
  out.registered_index = rec->interval_index;
  if (*out.observed_index != rec->interval_index) {
    out.decision = AuthDecision::RejectStep1;
    return out;
  }
  if (!config.step2_enabled) {
    out.decision = AuthDecision::Accept;
    return out;
  }
  const auto y = offsets(rec->a_registered, observations);
  TestResult t;
  if (config.test.sigma_known) {
    if (*config.test.sigma_known == 0.0) {
      // Noiseless channel: any offset at all is a different device.
      t.kind = config.test.a_delta_known ? TestKind::NP : TestKind::NPUnknownOffset;
      // Largest offset rather than the mean, which need not round back to a.
      t.statistic = 0.0;
      for (double v : y) t.statistic = std::max(t.statistic, std::abs(v));
      t.threshold = 0.0;
      t.decision = t.statistic > 0.0 ? Decision::H1DifferentDevice : Decision::H0SameDevice;
    } else {
      t = np_test(y, *config.test.sigma_known, config.test.a_delta_known, config.test.rho);
    }
  } else {
    const double b = config.glrt_threshold ? *config.glrt_threshold
                                           : glrt_threshold(y.size(), config.test.rho);
    t = glrt_test_with_threshold(y, b);
  }
  out.step2 = t;
  out.decision = t.decision == Decision::H1DifferentDevice ? AuthDecision::RejectStep2
                                                          : AuthDecision::Accept;
  return out;
}

QuantizerSpec separate_registered_pair(Whitelist& whitelist, const QuantizerSpec& spec,
                                       const PhyRecord& a, const PhyRecord& b) {
  QuantizerSpec next = insert_sub_boundary(spec, a.a_registered, b.a_registered);
  whitelist.rebuild(next);
  return next;
}

}  // namespace phyauth
