// SPDX-License-Identifier: Apache-2.0
//
// Transmitter IQ-imbalance profiles, the distorted received signal, and the
// noisy scalar observation a_hat = a + n that everything downstream consumes.

#pragma once

#include "phyauth/pdf_engine.hpp"
#include "phyauth/rng.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace phyauth {

using cplx = std::complex<double>;

struct IqiProfile {
  double alpha = 0.0;  // amplitude mismatch
  double theta = 0.0;  // phase mismatch, radians
  std::string device_id;
};

struct PopulationBounds {
  double theta_m = 0.0;
  double alpha_m = 0.0;

  bool contains(const IqiProfile& p) const {
    return std::abs(p.alpha) <= alpha_m && std::abs(p.theta) <= theta_m;
  }
};

enum class ParamKind { Case1Theta, Case1Alpha, Case2Composite };

// a = g_theta(theta) * g_alpha(alpha) + c for Case2Composite, or a single raw
// parameter for the Case1 kinds. Each component also knows the density it
// induces when its argument is uniform over the population bound.
struct CompositeParamSpec {
  ParamKind kind = ParamKind::Case2Composite;
  double c = 0.0;
  std::function<double(double)> g_theta;
  std::function<double(double)> g_alpha;
  std::function<ComponentPdf(double theta_m)> theta_component;
  std::function<ComponentPdf(double alpha_m)> alpha_component;

  // a = 1/2 + 1/2 (1 + alpha) cos(theta)
  static CompositeParamSpec worked_example();
  static CompositeParamSpec case1_theta();
  static CompositeParamSpec case1_alpha();

  // (a_min, a_max) over the population rectangle.
  std::pair<double, double> range(const PopulationBounds& b) const;
};

double composite_a(const IqiProfile& profile, const CompositeParamSpec& spec);

// Population density of a for the given bounds: the product law for
// Case2Composite and a uniform law for the Case1 kinds.
PiecewisePdf population_pdf(const CompositeParamSpec& spec, const PopulationBounds& b);

struct RxConstants {
  cplx c1{1.0, 0.0};
  cplx c2{0.0, 0.0};
};

struct ReceivedSignal {
  std::vector<cplx> samples;
  std::vector<cplx> h;
  IqiProfile tx_profile;
  RxConstants rx;
};

class SignalError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// z = [c1 H (1 + k) + c2 H* (1 - k*)] x / 2 + [c1 H (1 - k) + c2 H* (1 + k*)] x* / 2,
// k = (1 + alpha) e^{j theta}, H circulant with first column h zero-padded to N.
ReceivedSignal synthesize_received(const std::vector<cplx>& x, const std::vector<cplx>& h,
                                   const IqiProfile& profile, const RxConstants& rx = {});

struct Observation {
  double a_hat = 0.0;
  double sigma = 0.0;
  std::string source_device;
};

Observation observe(const IqiProfile& profile, const CompositeParamSpec& spec, double sigma,
                    Rng& rng);

// Mean of n_samples observations; the returned sigma is sigma / sqrt(n_samples).
Observation register_offline(const IqiProfile& profile, const CompositeParamSpec& spec,
                             double sigma, std::size_t n_samples, Rng& rng);

// Test-vector helpers.
std::vector<cplx> qpsk_symbols(std::size_t n, Rng& rng);
std::vector<cplx> channel_taps(std::size_t L, Rng& rng, double tap_variance = 2.0);
IqiProfile sample_profile(const PopulationBounds& b, Rng& rng, std::string device_id = {});

}  // namespace phyauth
