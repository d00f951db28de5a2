// SPDX-License-Identifier: Apache-2.0
//
// Bounded densities for the composite IQI parameter. A PiecewisePdf holds
// contiguous segments whose densities may themselves be integrals (the
// product-of-components law), plus a knot table of cumulative mass so cdf
// and inverse_cdf only ever integrate over a short stretch.

#pragma once

#include <json.hpp>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace phyauth {

class PdfError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct ComponentPdf {
  double lo = 0.0;
  double hi = 0.0;
  std::function<double(double)> density;
  // Optional. When present, product_pdf integrates in probability space,
  // which removes integrable endpoint singularities of the density.
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;

  // Throws PdfError on zero width or a density that does not integrate to 1.
  void validate() const;

  static ComponentPdf uniform(double lo, double hi);
  // Density of cos(t) for t ~ U(-theta_m, theta_m): 1/(theta_m sqrt(1-x^2)) on [cos theta_m, 1].
  static ComponentPdf cosine_of_uniform(double theta_m);
};

struct Segment {
  double lo;
  double hi;
  std::function<double(double)> density;
  std::string label;
};

class PiecewisePdf {
public:
  // Segments must be contiguous and cover [segments.front().lo, segments.back().hi].
  // Throws PdfError when the total mass misses 1 by more than norm_tol.
  PiecewisePdf(std::vector<Segment> segments, std::string id, double norm_tol = 1e-8,
               int knots_per_segment = 64);

  double lo() const { return segments_.front().lo; }
  double hi() const { return segments_.back().hi; }
  const std::string& id() const { return id_; }
  const std::vector<Segment>& segments() const { return segments_; }
  std::vector<std::string> segment_labels() const;

  // Raw integral of the segment densities before normalization.
  double total_mass() const { return total_; }

  // Normalized density; zero outside the support.
  double density(double x) const;
  // Clamped to [0, 1] outside the support.
  double cdf(double x) const;
  // |cdf(x) - p| < 1e-10 on return.
  double inverse_cdf(double p) const;

  // Support, breakpoints and a dense density table (points samples).
  nlohmann::json to_json(int points = 10000) const;

private:
  std::size_t segment_of(double x) const;
  double raw_integral(std::size_t seg, double a, double b) const;

  std::vector<Segment> segments_;
  std::string id_;
  double total_ = 0.0;
  // Knot abscissae and normalized cumulative mass at each knot, across all segments.
  std::vector<double> knot_x_;
  std::vector<double> knot_cdf_;
  std::vector<std::size_t> knot_seg_;
};

enum class Subcase {
  LowerJoinFirst,  // g_min1 g_max2 < g_max1 g_min2: three segments tau1, tau2, tau3
  UpperJoinFirst,  // g_min1 g_max2 > g_max1 g_min2: three segments tau1, tau4, tau3
  Equal,           // joins coincide: two segments tau1, tau3
};

const char* to_string(Subcase s);

// rel_tol compares |G1 - G2| against max(G1, G2).
Subcase select_subcase(double g1_join, double g2_join, double rel_tol);

// Default tolerance for treating the two joins as coincident.
inline constexpr double kSubcaseRelTol = 1e-4;

struct ProductPdfResult {
  PiecewisePdf pdf;
  Subcase subcase;
  double join_lo;  // G0 + c
  double join_1;   // g_min1 g_max2 + c
  double join_2;   // g_max1 g_min2 + c
  double join_hi;  // G3 + c
};

// Density of a = g1 g2 + c for independent components with positive supports.
ProductPdfResult product_pdf(const ComponentPdf& g1, const ComponentPdf& g2, double c,
                             double equal_rel_tol = kSubcaseRelTol);

// Hand-derived logarithmic forms for a = 1/2 + 1/2 (1 + alpha) cos(theta)
// with theta ~ U(-theta_m, theta_m), alpha ~ U(-alpha_m, alpha_m).
ProductPdfResult example_tau_segments(double theta_m, double alpha_m,
                                      double equal_rel_tol = kSubcaseRelTol);

// The individual closed forms, in the shifted variable x = a - 1/2.
namespace tau {
double tau1(double x, double theta_m, double alpha_m);
double tau2(double x, double theta_m, double alpha_m);
double tau3(double x, double theta_m, double alpha_m);
double tau4(double theta_m, double alpha_m);
}  // namespace tau

PiecewisePdf uniform_pdf(double lo, double hi);

}  // namespace phyauth
