// SPDX-License-Identifier: Apache-2.0

#include "phyauth/offload.hpp"

#include "phyauth/ndn_security.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <vector>

namespace phyauth {

namespace {
constexpr double kSlack = 1e-9;
}

double DeviceProfile::xi(double b_s, double c_b) const {
  if (calibrated_xi) {
    return *calibrated_xi;
  }
  if (!(freq_hz > 0.0)) {
    throw std::invalid_argument("device " + name + " has no positive frequency");
  }
  const double cycles = cycles_per_bit > 0.0 ? cycles_per_bit : c_b;
  return b_s * cycles / freq_hz;
}

DeviceProfile cc2430_profile() { return {"cc2430", 32e6, 0.0, std::nullopt}; }
DeviceProfile raspberry_pi_profile() { return {"raspberry_pi", 1.2e9, 0.0, std::nullopt}; }
DeviceProfile laptop_profile() { return {"laptop", 2.4e9, 0.0, std::nullopt}; }

const char* to_string(AvailabilityModel m) {
  return m == AvailabilityModel::TimeShared ? "time_shared" : "contiguous_window";
}

double time_saving(long n_p, double b_s, double c_b, double f_ed, double f_mec) {
  return static_cast<double>(n_p) * b_s * c_b * (1.0 / f_ed - 1.0 / f_mec);
}

OffloadPlan evaluate_split(const OffloadProblem& p, long n_p1) {
  const double xm = p.mec.xi(p.b_s, p.c_b);
  const double xe = p.ed.xi(p.b_s, p.c_b);
  OffloadPlan plan;
  plan.n_p1 = n_p1;
  plan.n_p2 = p.n_p - n_p1;
  const double busy = static_cast<double>(n_p1) * xm;
  if (n_p1 == 0) {
    plan.t1 = 0.0;
  } else if (p.model == AvailabilityModel::TimeShared) {
    plan.t1 = busy / p.phi;
  } else {
    plan.t1 = busy;
  }
  plan.t2 = static_cast<double>(plan.n_p2) * xe;
  plan.makespan = std::max(plan.t1, plan.t2);
  return plan;
}

bool is_feasible(const OffloadProblem& p, const OffloadPlan& plan) {
  if (plan.n_p1 < 0 || plan.n_p2 < 0 || plan.n_p1 + plan.n_p2 != p.n_p) {
    return false;
  }
  const double busy = static_cast<double>(plan.n_p1) * p.mec.xi(p.b_s, p.c_b);
  return busy <= p.phi * p.T * (1.0 + kSlack) && plan.t2 <= p.T * (1.0 + kSlack);
}

OffloadPlan optimize(const OffloadProblem& p) {
  if (p.n_p < 0) {
    throw std::invalid_argument("n_p must be non-negative");
  }
  if (!(p.phi >= 0.0 && p.phi <= 1.0)) {
    throw std::invalid_argument("phi must lie in [0, 1]");
  }
  if (!(p.T > 0.0)) {
    throw std::invalid_argument("T must be positive");
  }
  const double xm = p.mec.xi(p.b_s, p.c_b);
  const double xe = p.ed.xi(p.b_s, p.c_b);

  const long cap1 = std::min<long>(p.n_p, static_cast<long>(std::floor(p.phi * p.T * (1.0 + kSlack) / xm)));
  const long ed_max = std::min<long>(p.n_p, static_cast<long>(std::floor(p.T * (1.0 + kSlack) / xe)));
  const long lo = p.n_p - ed_max;
  const long hi = cap1;
  if (lo > hi) {
    throw InfeasibleError("no split meets both the server cap and the device deadline");
  }
  if (p.phi == 0.0) {
    return evaluate_split(p, 0);
  }

  // t1 = t2 on the continuum.
  const double eff_m = p.model == AvailabilityModel::TimeShared ? xm / p.phi : xm;
  const double n1_star = static_cast<double>(p.n_p) * xe / (eff_m + xe);

  OffloadPlan best;
  bool have = false;
  // Try ceiling first so ties go to the server.
  for (double cand : {std::ceil(n1_star), std::floor(n1_star)}) {
    const long n1 = std::clamp(static_cast<long>(cand), lo, hi);
    const OffloadPlan plan = evaluate_split(p, n1);
    if (!is_feasible(p, plan)) {
      continue;
    }
    if (!have || plan.makespan < best.makespan) {
      best = plan;
      have = true;
    }
  }
  if (!have) {
    throw InfeasibleError("rounded plans violate the constraints");
  }
  return best;
}

DeviceProfile calibrate_xi(const DeviceProfile& device, double host_measurement,
                           double host_freq_hz) {
  DeviceProfile out = device;
  out.calibrated_xi = host_measurement * (host_freq_hz / device.freq_hz);
  return out;
}

double measure_sign_seconds(int key_bits, int reps) {
  const ndn::RsaKey key = ndn::RsaKey::generate(key_bits);
  const ndn::Bytes message(256, 0x5a);
  key.sign_bytes(message);  // warm-up
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(reps));
  for (int i = 0; i < reps; ++i) {
    const auto a = std::chrono::steady_clock::now();
    key.sign_bytes(message);
    const auto b = std::chrono::steady_clock::now();
    t.push_back(std::chrono::duration<double>(b - a).count());
  }
  std::nth_element(t.begin(), t.begin() + static_cast<long>(t.size() / 2), t.end());
  return t[t.size() / 2];
}

double host_cpu_hz(double fallback) {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("cpu MHz", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        try {
          const double mhz = std::stod(line.substr(colon + 1));
          if (mhz > 0.0) {
            return mhz * 1e6;
          }
        } catch (const std::exception&) {
        }
      }
    }
  }
  return fallback;
}

}  // namespace phyauth
