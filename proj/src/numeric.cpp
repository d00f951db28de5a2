// SPDX-License-Identifier: Apache-2.0

#include "phyauth/numeric.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace phyauth::numeric {

namespace {

// Kronrod abscissae; odd indices are shared with the 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod_15(const ScalarFn& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * fsum;
    if (j % 2 == 1) {
      gauss += kWg[j / 2] * fsum;
    }
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

double integrate(const ScalarFn& f, double a, double b, const QuadratureOptions& opts) {
  if (a == b) {
    return 0.0;
  }
  if (b < a) {
    return -integrate(f, b, a, opts);
  }
  std::priority_queue<Panel> panels;
  Panel first = gauss_kronrod_15(f, a, b);
  double total = first.value;
  double total_err = first.error;
  panels.push(first);
  int count = 1;
  while (total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
    if (count >= opts.max_intervals) {
      throw QuadratureError("integrate: no convergence on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "], error estimate " +
                            std::to_string(total_err));
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Cannot split further in double precision; accept what we have.
      break;
    }
    Panel left = gauss_kronrod_15(f, worst.a, mid);
    Panel right = gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  double sum = 0.0;
  while (!panels.empty()) {
    sum += panels.top().value;
    panels.pop();
  }
  return sum;
}

double find_root(const ScalarFn& f, double lo, double hi, double rel_tol, double abs_tol,
                 int max_iter) {
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) {
    return a;
  }
  if (fb == 0.0) {
    return b;
  }
  if ((fa > 0.0) == (fb > 0.0)) {
    throw RootError("find_root: no sign change on bracket");
  }
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                       0.5 * (abs_tol + rel_tol * std::abs(b));
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) {
      return b;
    }
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  throw RootError("find_root: iteration limit reached");
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("q_inverse: p must lie in (0, 1)");
  }
  return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

namespace {

double log_beta_prefactor(double x, double a, double b) {
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
         b * std::log1p(-x);
}

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 20000;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) {
    d = kTiny;
  }
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) {
      d = kTiny;
    }
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) {
      c = kTiny;
    }
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) {
      d = kTiny;
    }
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) {
      c = kTiny;
    }
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) {
      return h;
    }
  }
  throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

bool is_small_integer(double v) { return v >= 1.0 && v <= 2000.0 && std::floor(v) == v; }

}  // namespace

double incomplete_beta_cf(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) {
    throw std::domain_error("incomplete_beta: parameters must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("incomplete_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (x == 1.0) {
    return 1.0;
  }
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_beta_prefactor(x, a, b)) * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - std::exp(log_beta_prefactor(x, a, b)) * beta_continued_fraction(1.0 - x, b, a) / b;
}

double incomplete_beta_integer(double x, int a, int b) {
  if (a < 1 || b < 1) {
    throw std::domain_error("incomplete_beta_integer: parameters must be positive integers");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("incomplete_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (x == 1.0) {
    return 1.0;
  }
  // I_x(a, b) = P(Binomial(a + b - 1, x) >= a); sum the shorter tail.
  const int n = a + b - 1;
  const double lx = std::log(x);
  const double l1x = std::log1p(-x);
  const double lfact_n = std::lgamma(n + 1.0);
  auto term = [&](int j) {
    return std::exp(lfact_n - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * lx +
                    (n - j) * l1x);
  };
  const bool upper_shorter = (n - a + 1) <= a;
  double sum = 0.0;
  if (upper_shorter) {
    for (int j = n; j >= a; --j) {
      sum += term(j);
    }
    return std::min(1.0, sum);
  }
  for (int j = 0; j < a; ++j) {
    sum += term(j);
  }
  return std::max(0.0, 1.0 - sum);
}

double incomplete_beta(double x, double a, double b) {
  if (is_small_integer(a) && is_small_integer(b) && a + b - 1.0 <= 2000.0) {
    return incomplete_beta_integer(x, static_cast<int>(a), static_cast<int>(b));
  }
  return incomplete_beta_cf(x, a, b);
}

}  // namespace phyauth::numeric
