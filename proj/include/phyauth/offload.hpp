// SPDX-License-Identifier: Apache-2.0
//
// Splitting N_p packet signings between the end device and the edge server
// so the later of the two finishing times is as early as possible.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace phyauth {

class InfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct DeviceProfile {
  std::string name;
  double freq_hz = 0.0;
  double cycles_per_bit = 0.0;
  // Measured seconds per packet; overrides the cycle model when set.
  std::optional<double> calibrated_xi;

  // Seconds to sign one packet of b_s bits at c_b cycles per bit.
  double xi(double b_s, double c_b) const;
};

DeviceProfile cc2430_profile();        // 32 MHz
DeviceProfile raspberry_pi_profile();  // 1.2 GHz
DeviceProfile laptop_profile();        // 2.4 GHz

// How the edge server's availability fraction phi shapes its timeline.
//  ContiguousWindow: the server works at full speed inside a window of
//    length phi T, so t1 = n1 xi_mec.
//  TimeShared: the server grants a phi share of every instant, so
//    t1 = n1 xi_mec / phi.
// Both cap the server's busy time n1 xi_mec at phi T.
enum class AvailabilityModel { ContiguousWindow, TimeShared };

const char* to_string(AvailabilityModel m);

struct OffloadProblem {
  long n_p = 10;
  double b_s = 1.0;
  double c_b = 1.0;
  DeviceProfile ed;
  DeviceProfile mec;
  double phi = 1.0;
  double T = 1.0;
  AvailabilityModel model = AvailabilityModel::ContiguousWindow;
};

struct OffloadPlan {
  long n_p1 = 0;  // signed by the edge server
  long n_p2 = 0;  // signed by the end device
  double t1 = 0.0;
  double t2 = 0.0;
  double makespan = 0.0;
};

// N_p B_s C_b (1/f_ed - 1/f_mec).
double time_saving(long n_p, double b_s, double c_b, double f_ed, double f_mec);

OffloadPlan evaluate_split(const OffloadProblem& p, long n_p1);
// Busy-time cap on the server and deadline on the device, with a 1e-9 relative slack.
bool is_feasible(const OffloadProblem& p, const OffloadPlan& plan);

// Continuous balance point rounded toward the server, then clamped into the
// feasible range. Throws InfeasibleError when no split meets both limits.
OffloadPlan optimize(const OffloadProblem& p);

// measured_seconds * host_freq / device.freq_hz
DeviceProfile calibrate_xi(const DeviceProfile& device, double host_measurement,
                           double host_freq_hz);

// Median wall time of one RSA signature over a fixed message on this host.
double measure_sign_seconds(int key_bits, int reps = 15);

// First "cpu MHz" entry of /proc/cpuinfo, or fallback when unavailable.
double host_cpu_hz(double fallback = 2.4e9);

}  // namespace phyauth
