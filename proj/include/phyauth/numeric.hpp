// SPDX-License-Identifier: Apache-2.0
//
// Numerical building blocks shared by the density engine and the detectors:
// adaptive Gauss-Kronrod quadrature, bracketed root finding, the Gaussian
// tail function and the regularized incomplete beta function.

#pragma once

#include <functional>
#include <stdexcept>

namespace phyauth::numeric {

class QuadratureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class RootError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using ScalarFn = std::function<double(double)>;

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

/// Globally adaptive 15-point Gauss-Kronrod integration of f over [a, b].
/// Throws QuadratureError when the tolerance is not met within
/// max_intervals subdivisions.
double integrate(const ScalarFn& f, double a, double b, const QuadratureOptions& opts = {});

/// Root of a function that changes sign on [lo, hi] (Brent's method).
/// Stops when the bracket is narrower than abs_tol + rel_tol * |x|.
double find_root(const ScalarFn& f, double lo, double hi, double rel_tol = 1e-14,
                 double abs_tol = 0.0, int max_iter = 300);

/// Upper tail of the standard normal, Q(x) = P(Z > x).
double q_function(double x);

/// Inverse of q_function on (0, 1).
double q_inverse(double p);

/// I_x(a, b) for a, b > 0 and x in [0, 1].
///
/// Integer-valued (a, b) with a + b - 1 <= 2000 are evaluated as a finite
/// binomial tail; everything else goes through the Lentz continued fraction.
double incomplete_beta(double x, double a, double b);

/// Continued-fraction route only (exposed for cross-checking the integer path).
double incomplete_beta_cf(double x, double a, double b);

/// Finite binomial-sum route; requires positive integer a and b.
double incomplete_beta_integer(double x, int a, int b);

}  // namespace phyauth::numeric
