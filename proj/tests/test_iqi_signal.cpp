// SPDX-License-Identifier: Apache-2.0
#include "phyauth/iqi_signal.hpp"

#include <doctest.h>

#include <numbers>

using namespace phyauth;

namespace {

using Mat = std::vector<std::vector<cplx>>;

// Circulant matrix whose first column is h zero-padded to n.
Mat circulant(const std::vector<cplx>& h, std::size_t n) {
  Mat H(n, std::vector<cplx>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t l = (i + n - j) % n;
      H[i][j] = l < h.size() ? h[l] : cplx{};
    }
  }
  return H;
}

Mat conj(const Mat& m) {
  Mat c = m;
  for (auto& row : c) {
    for (auto& v : row) v = std::conj(v);
  }
  return c;
}

std::vector<cplx> mul(const Mat& m, const std::vector<cplx>& x) {
  std::vector<cplx> y(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += m[i][j] * x[j];
  }
  return y;
}

std::vector<cplx> conj(const std::vector<cplx>& x) {
  std::vector<cplx> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = std::conj(x[i]);
  return c;
}

// Dense-matrix form of the IQI-distorted received signal.
std::vector<cplx> dense_reference(const std::vector<cplx>& x, const std::vector<cplx>& h,
                                  double alpha, double theta, cplx c1, cplx c2) {
  const std::size_t n = x.size();
  const cplx k = (1.0 + alpha) * std::exp(cplx(0, theta));
  const Mat H = circulant(h, n);
  const Mat Hb = conj(H);
  const auto Hx = mul(H, x), Hxc = mul(H, conj(x)), Hbx = mul(Hb, x), Hbxc = mul(Hb, conj(x));
  std::vector<cplx> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = 0.5 * (c1 * (1.0 + k) * Hx[i] + c2 * (1.0 - std::conj(k)) * Hbx[i]) +
           0.5 * (c1 * (1.0 - k) * Hxc[i] + c2 * (1.0 + std::conj(k)) * Hbxc[i]);
  }
  return z;
}

}  // namespace

TEST_CASE("received signal matches the dense-matrix form") {
  Rng rng(3);
  for (auto [n, L] : {std::pair<std::size_t, std::size_t>{16, 4}, {33, 7}, {8, 8}, {5, 1}}) {
    const auto x = qpsk_symbols(n, rng);
    const auto h = channel_taps(L, rng);
    const IqiProfile p{0.03, -0.2, "d"};
    for (RxConstants rx : {RxConstants{}, RxConstants{{0.9, 0.1}, {0.2, -0.3}}}) {
      const auto got = synthesize_received(x, h, p, rx);
      const auto ref = dense_reference(x, h, p.alpha, p.theta, rx.c1, rx.c2);
      REQUIRE(got.samples.size() == n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(got.samples[i] - ref[i]) < 1e-12);
      }
    }
  }
}

TEST_CASE("no imbalance leaves only the channel") {
  Rng rng(5);
  const auto x = qpsk_symbols(12, rng);
  const auto h = channel_taps(3, rng);
  const auto z = synthesize_received(x, h, {0.0, 0.0, ""});
  const auto ref = mul(circulant(h, 12), x);
  for (std::size_t i = 0; i < 12; ++i) CHECK(std::abs(z.samples[i] - ref[i]) < 1e-13);
}

TEST_CASE("signal errors") {
  Rng rng(1);
  CHECK_THROWS_AS(synthesize_received(qpsk_symbols(3, rng), channel_taps(4, rng), {}), SignalError);
  CHECK_THROWS_AS(synthesize_received(qpsk_symbols(3, rng), {}, {}), SignalError);
}

TEST_CASE("composite parameter and its range") {
  const auto s = CompositeParamSpec::worked_example();
  CHECK(composite_a({0.04, 0.0, ""}, s) == doctest::Approx(1.02));
  CHECK(composite_a({0.0, std::numbers::pi / 3, ""}, s) == doctest::Approx(0.75));
  const auto [lo, hi] = s.range({5 * std::numbers::pi / 36, 0.04});
  CHECK(lo == doctest::Approx(0.5 + 0.48 * std::cos(5 * std::numbers::pi / 36)));
  CHECK(hi == doctest::Approx(1.02));
  CHECK(composite_a({0.01, -0.2, ""}, CompositeParamSpec::case1_theta()) == -0.2);
  CHECK(composite_a({0.01, -0.2, ""}, CompositeParamSpec::case1_alpha()) == 0.01);
  const auto u = population_pdf(CompositeParamSpec::case1_theta(), {0.3, 0.04});
  CHECK(u.lo() == -0.3);
  CHECK(u.density(0.1) == doctest::Approx(1.0 / 0.6));
}

TEST_CASE("observations and registration") {
  const auto s = CompositeParamSpec::worked_example();
  const IqiProfile p{0.01, 0.1, "ed"};
  const double a = composite_a(p, s);
  Rng rng(9);
  CHECK(observe(p, s, 0.0, rng).a_hat == a);
  CHECK_THROWS_AS(observe(p, s, -1.0, rng), SignalError);
  CHECK_THROWS_AS(register_offline(p, s, 1e-3, 0, rng), SignalError);
  const auto reg = register_offline(p, s, 1e-3, 10000, rng);
  CHECK(reg.sigma == doctest::Approx(1e-5));
  CHECK(std::abs(reg.a_hat - a) < 5e-5);
  CHECK(reg.source_device == "ed");

  // Sample variance of single observations.
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = observe(p, s, 2e-3, rng).a_hat - a;
    sum += v;
    sq += v * v;
  }
  CHECK(std::sqrt(sq / n - (sum / n) * (sum / n)) == doctest::Approx(2e-3).epsilon(0.03));
}

TEST_CASE("sampled profiles stay inside the bounds") {
  Rng rng(2);
  const PopulationBounds b{0.2, 0.05};
  for (int i = 0; i < 1000; ++i) CHECK(b.contains(sample_profile(b, rng)));
}
