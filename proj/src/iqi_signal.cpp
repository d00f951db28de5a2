// SPDX-License-Identifier: Apache-2.0

#include "phyauth/iqi_signal.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>

namespace phyauth {

CompositeParamSpec CompositeParamSpec::worked_example() {
  CompositeParamSpec s;
  s.kind = ParamKind::Case2Composite;
  s.c = 0.5;
  s.g_theta = [](double t) { return std::cos(t); };
  s.g_alpha = [](double a) { return 0.5 * (1.0 + a); };
  s.theta_component = [](double theta_m) { return ComponentPdf::cosine_of_uniform(theta_m); };
  s.alpha_component = [](double alpha_m) {
    return ComponentPdf::uniform((1.0 - alpha_m) / 2.0, (1.0 + alpha_m) / 2.0);
  };
  return s;
}

CompositeParamSpec CompositeParamSpec::case1_theta() {
  CompositeParamSpec s;
  s.kind = ParamKind::Case1Theta;
  return s;
}

CompositeParamSpec CompositeParamSpec::case1_alpha() {
  CompositeParamSpec s;
  s.kind = ParamKind::Case1Alpha;
  return s;
}

std::pair<double, double> CompositeParamSpec::range(const PopulationBounds& b) const {
  switch (kind) {
    case ParamKind::Case1Theta:
      return {-b.theta_m, b.theta_m};
    case ParamKind::Case1Alpha:
      return {-b.alpha_m, b.alpha_m};
    case ParamKind::Case2Composite:
      break;
  }
  // Monotone components: extremes sit at the corners. theta enters through
  // an even function here, so include theta = 0 as a candidate too.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double t : {-b.theta_m, 0.0, b.theta_m}) {
    for (double a : {-b.alpha_m, b.alpha_m}) {
      const double v = g_theta(t) * g_alpha(a) + c;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi};
}

double composite_a(const IqiProfile& profile, const CompositeParamSpec& spec) {
  switch (spec.kind) {
    case ParamKind::Case1Theta:
      return profile.theta;
    case ParamKind::Case1Alpha:
      return profile.alpha;
    case ParamKind::Case2Composite:
      break;
  }
  return spec.g_theta(profile.theta) * spec.g_alpha(profile.alpha) + spec.c;
}

PiecewisePdf population_pdf(const CompositeParamSpec& spec, const PopulationBounds& b) {
  if (spec.kind != ParamKind::Case2Composite) {
    const auto [lo, hi] = spec.range(b);
    return uniform_pdf(lo, hi);
  }
  return product_pdf(spec.theta_component(b.theta_m), spec.alpha_component(b.alpha_m), spec.c).pdf;
}

ReceivedSignal synthesize_received(const std::vector<cplx>& x, const std::vector<cplx>& h,
                                   const IqiProfile& profile, const RxConstants& rx) {
  const std::size_t n = x.size();
  const std::size_t L = h.size();
  if (L < 1) {
    throw SignalError("impulse response is empty");
  }
  if (n < L) {
    throw SignalError("symbol vector shorter than the impulse response (N < L)");
  }
  const cplx k = (1.0 + profile.alpha) * std::polar(1.0, profile.theta);
  const cplx kc = std::conj(k);

  // Cyclic convolutions: Hx, Hx*, conj(H)x, conj(H)x*.
  std::vector<cplx> hx(n), hxc(n), hcx(n), hcxc(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx s1{}, s2{}, s3{}, s4{};
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t j = (i + n - l) % n;
      const cplx xv = x[j];
      const cplx xcv = std::conj(xv);
      const cplx hl = h[l];
      const cplx hlc = std::conj(hl);
      s1 += hl * xv;
      s2 += hl * xcv;
      s3 += hlc * xv;
      s4 += hlc * xcv;
    }
    hx[i] = s1;
    hxc[i] = s2;
    hcx[i] = s3;
    hcxc[i] = s4;
  }

  ReceivedSignal out;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx direct = rx.c1 * (1.0 + k) * hx[i] + rx.c2 * (1.0 - kc) * hcx[i];
    const cplx image = rx.c1 * (1.0 - k) * hxc[i] + rx.c2 * (1.0 + kc) * hcxc[i];
    out.samples[i] = 0.5 * (direct + image);
  }
  out.h = h;
  out.tx_profile = profile;
  out.rx = rx;
  return out;
}

Observation observe(const IqiProfile& profile, const CompositeParamSpec& spec, double sigma,
                    Rng& rng) {
  if (sigma < 0.0) {
    throw SignalError("sigma must be non-negative");
  }
  const double a = composite_a(profile, spec);
  if (sigma == 0.0) {
    return {a, 0.0, profile.device_id};
  }
  std::normal_distribution<double> noise(0.0, sigma);
  return {a + noise(rng), sigma, profile.device_id};
}

Observation register_offline(const IqiProfile& profile, const CompositeParamSpec& spec,
                             double sigma, std::size_t n_samples, Rng& rng) {
  if (n_samples == 0) {
    throw SignalError("register_offline needs at least one sample");
  }
  if (n_samples == 1) {
    return observe(profile, spec, sigma, rng);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    sum += observe(profile, spec, sigma, rng).a_hat;
  }
  return {sum / static_cast<double>(n_samples), sigma / std::sqrt(static_cast<double>(n_samples)),
          profile.device_id};
}

std::vector<cplx> qpsk_symbols(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, 3);
  const double s = 1.0 / std::numbers::sqrt2;
  std::vector<cplx> out(n);
  for (auto& v : out) {
    const int q = pick(rng);
    v = cplx((q & 1) ? -s : s, (q & 2) ? -s : s);
  }
  return out;
}

std::vector<cplx> channel_taps(std::size_t L, Rng& rng, double tap_variance) {
  // CN(0, v): each of real and imaginary parts carries v/2.
  std::normal_distribution<double> g(0.0, std::sqrt(tap_variance / 2.0));
  std::vector<cplx> h(L);
  for (auto& v : h) {
    const double re = g(rng);
    const double im = g(rng);
    v = cplx(re, im);
  }
  return h;
}

IqiProfile sample_profile(const PopulationBounds& b, Rng& rng, std::string device_id) {
  std::uniform_real_distribution<double> ut(-b.theta_m, b.theta_m);
  std::uniform_real_distribution<double> ua(-b.alpha_m, b.alpha_m);
  IqiProfile p;
  p.theta = ut(rng);
  p.alpha = ua(rng);
  p.device_id = std::move(device_id);
  return p;
}

}  // namespace phyauth
