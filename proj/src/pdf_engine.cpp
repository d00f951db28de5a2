// SPDX-License-Identifier: Apache-2.0

#include "phyauth/pdf_engine.hpp"

#include "phyauth/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string_view>
#include <utility>

namespace phyauth {

namespace {

constexpr numeric::QuadratureOptions kOuterQuad{1e-13, 1e-12, 4000};
constexpr numeric::QuadratureOptions kInnerQuad{1e-12, 1e-12, 4000};

}  // namespace

void ComponentPdf::validate() const {
  if (!(hi > lo)) {
    throw PdfError("component pdf has zero or negative width support");
  }
  if (!density) {
    throw PdfError("component pdf has no density");
  }
  double mass = 0.0;
  if (cdf) {
    mass = cdf(hi) - cdf(lo);
  } else {
    try {
      mass = numeric::integrate(density, lo, hi, {1e-10, 1e-10, 4000});
    } catch (const numeric::QuadratureError& e) {
      throw PdfError(std::string("component pdf normalization failed: ") + e.what());
    }
  }
  if (std::abs(mass - 1.0) > 1e-8) {
    throw PdfError("component pdf integrates to " + std::to_string(mass) + ", not 1");
  }
}

ComponentPdf ComponentPdf::uniform(double lo, double hi) {
  if (!(hi > lo)) {
    throw PdfError("uniform component needs hi > lo");
  }
  const double w = hi - lo;
  ComponentPdf out;
  out.lo = lo;
  out.hi = hi;
  out.density = [lo, hi, w](double x) { return (x >= lo && x <= hi) ? 1.0 / w : 0.0; };
  out.cdf = [lo, w](double x) { return std::clamp((x - lo) / w, 0.0, 1.0); };
  out.quantile = [lo, w](double p) { return lo + std::clamp(p, 0.0, 1.0) * w; };
  return out;
}

ComponentPdf ComponentPdf::cosine_of_uniform(double theta_m) {
  if (!(theta_m > 0.0 && theta_m < std::numbers::pi / 2)) {
    throw PdfError("cosine component needs 0 < theta_m < pi/2");
  }
  ComponentPdf out;
  out.lo = std::cos(theta_m);
  out.hi = 1.0;
  const double lo = out.lo;
  out.density = [theta_m, lo](double x) {
    if (x < lo || x >= 1.0) {
      return 0.0;
    }
    return 1.0 / (theta_m * std::sqrt(1.0 - x * x));
  };
  out.cdf = [theta_m, lo](double x) {
    if (x <= lo) {
      return 0.0;
    }
    if (x >= 1.0) {
      return 1.0;
    }
    return 1.0 - std::acos(x) / theta_m;
  };
  out.quantile = [theta_m](double p) { return std::cos(theta_m * (1.0 - std::clamp(p, 0.0, 1.0))); };
  return out;
}

PiecewisePdf::PiecewisePdf(std::vector<Segment> segments, std::string id, double norm_tol,
                           int knots_per_segment)
    : segments_(std::move(segments)), id_(std::move(id)) {
  if (segments_.empty()) {
    throw PdfError("piecewise pdf needs at least one segment");
  }
  if (knots_per_segment < 1) {
    throw PdfError("knots_per_segment must be positive");
  }
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (!(segments_[i].hi > segments_[i].lo)) {
      throw PdfError("segment " + std::to_string(i) + " is empty or reversed");
    }
    if (i > 0 && segments_[i].lo != segments_[i - 1].hi) {
      throw PdfError("segments are not contiguous at index " + std::to_string(i));
    }
  }

  std::vector<double> raw_cum;
  raw_cum.push_back(0.0);
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const double a = segments_[s].lo;
    const double b = segments_[s].hi;
    for (int k = 0; k < knots_per_segment; ++k) {
      const double x0 = a + (b - a) * k / knots_per_segment;
      const double x1 = (k + 1 == knots_per_segment) ? b : a + (b - a) * (k + 1) / knots_per_segment;
      knot_x_.push_back(x0);
      knot_seg_.push_back(s);
      const double piece = raw_integral(s, x0, x1);
      if (piece < -1e-12) {
        throw PdfError("negative density mass in segment " + segments_[s].label);
      }
      raw_cum.push_back(raw_cum.back() + std::max(piece, 0.0));
    }
  }
  knot_x_.push_back(hi());
  knot_seg_.push_back(segments_.size() - 1);
  total_ = raw_cum.back();
  if (!(std::abs(total_ - 1.0) <= norm_tol)) {
    throw PdfError("pdf '" + id_ + "' integrates to " + std::to_string(total_));
  }
  knot_cdf_.resize(raw_cum.size());
  for (std::size_t i = 0; i < raw_cum.size(); ++i) {
    knot_cdf_[i] = raw_cum[i] / total_;
  }
  knot_cdf_.back() = 1.0;
}

std::vector<std::string> PiecewisePdf::segment_labels() const {
  std::vector<std::string> out;
  for (const auto& s : segments_) {
    out.push_back(s.label);
  }
  return out;
}

double PiecewisePdf::raw_integral(std::size_t seg, double a, double b) const {
  if (b <= a) {
    return 0.0;
  }
  return numeric::integrate(segments_[seg].density, a, b, kOuterQuad);
}

std::size_t PiecewisePdf::segment_of(double x) const {
  std::size_t s = 0;
  while (s + 1 < segments_.size() && x >= segments_[s].hi) {
    ++s;
  }
  return s;
}

double PiecewisePdf::density(double x) const {
  if (x < lo() || x > hi()) {
    return 0.0;
  }
  return segments_[segment_of(x)].density(x) / total_;
}

double PiecewisePdf::cdf(double x) const {
  if (x <= lo()) {
    return 0.0;
  }
  if (x >= hi()) {
    return 1.0;
  }
  auto it = std::upper_bound(knot_x_.begin(), knot_x_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - knot_x_.begin()) - 1;
  const double v = knot_cdf_[k] + raw_integral(knot_seg_[k], knot_x_[k], x) / total_;
  return std::clamp(v, knot_cdf_[k], knot_cdf_[k + 1]);
}

double PiecewisePdf::inverse_cdf(double p) const {
  if (p <= 0.0) {
    return lo();
  }
  if (p >= 1.0) {
    return hi();
  }
  auto it = std::upper_bound(knot_cdf_.begin(), knot_cdf_.end(), p);
  const std::size_t k = static_cast<std::size_t>(it - knot_cdf_.begin()) - 1;
  if (k + 1 >= knot_x_.size()) {
    return hi();
  }
  if (knot_cdf_[k] == p) {
    return knot_x_[k];
  }
  const double a = knot_x_[k];
  const double b = knot_x_[k + 1];
  const std::size_t seg = knot_seg_[k];
  const double base = knot_cdf_[k];
  auto g = [&](double x) { return base + raw_integral(seg, a, x) / total_ - p; };
  return numeric::find_root(g, a, b, 1e-15, 0.0, 400);
}

nlohmann::json PiecewisePdf::to_json(int points) const {
  nlohmann::json j;
  j["id"] = id_;
  j["support"] = {lo(), hi()};
  std::vector<double> breaks;
  breaks.push_back(lo());
  for (const auto& s : segments_) {
    breaks.push_back(s.hi);
  }
  j["breakpoints"] = breaks;
  j["segments"] = segment_labels();
  j["raw_mass"] = total_;
  std::vector<double> xs;
  std::vector<double> fs;
  xs.reserve(points);
  fs.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double x = (points == 1) ? lo() : lo() + (hi() - lo()) * i / (points - 1);
    xs.push_back(x);
    fs.push_back(density(x));
  }
  j["x"] = xs;
  j["density"] = fs;
  return j;
}

const char* to_string(Subcase s) {
  switch (s) {
    case Subcase::LowerJoinFirst:
      return "lower_join_first";
    case Subcase::UpperJoinFirst:
      return "upper_join_first";
    case Subcase::Equal:
      return "equal";
  }
  return "?";
}

Subcase select_subcase(double g1_join, double g2_join, double rel_tol) {
  const double scale = std::max(std::abs(g1_join), std::abs(g2_join));
  if (std::abs(g1_join - g2_join) <= rel_tol * scale) {
    return Subcase::Equal;
  }
  return g1_join < g2_join ? Subcase::LowerJoinFirst : Subcase::UpperJoinFirst;
}

namespace {

std::vector<Segment> layout_segments(Subcase sc, double c, double g0, double g1, double g2,
                                     double g3,
                                     const std::function<double(double, const char*)>& dens) {
  auto seg = [&](double lo, double hi, const char* label) {
    return Segment{lo + c, hi + c, [dens, label](double a) { return dens(a, label); }, label};
  };
  std::vector<Segment> out;
  switch (sc) {
    case Subcase::LowerJoinFirst:
      out.push_back(seg(g0, g1, "tau1"));
      out.push_back(seg(g1, g2, "tau2"));
      out.push_back(seg(g2, g3, "tau3"));
      break;
    case Subcase::UpperJoinFirst:
      out.push_back(seg(g0, g2, "tau1"));
      out.push_back(seg(g2, g1, "tau4"));
      out.push_back(seg(g1, g3, "tau3"));
      break;
    case Subcase::Equal: {
      const double mid = std::min(g1, g2);
      out.push_back(seg(g0, mid, "tau1"));
      out.push_back(seg(mid, g3, "tau3"));
      break;
    }
  }
  // Shifting by c can round the shared endpoints differently; force exact joins.
  for (std::size_t i = 1; i < out.size(); ++i) {
    out[i].lo = out[i - 1].hi;
  }
  return out;
}

}  // namespace

ProductPdfResult product_pdf(const ComponentPdf& g1, const ComponentPdf& g2, double c,
                             double equal_rel_tol) {
  if (!(g1.lo > 0.0 && g2.lo > 0.0)) {
    throw PdfError("product_pdf needs strictly positive component supports");
  }
  g1.validate();
  g2.validate();

  const double G0 = g1.lo * g2.lo;
  const double G1 = g1.lo * g2.hi;
  const double G2 = g1.hi * g2.lo;
  const double G3 = g1.hi * g2.hi;
  const Subcase sc = select_subcase(G1, G2, equal_rel_tol);

  // Integrate over whichever component offers a quantile; the law is symmetric.
  const bool swap = !g1.quantile && g2.quantile;
  const ComponentPdf u = swap ? g2 : g1;
  const ComponentPdf v = swap ? g1 : g2;

  auto tau = [u, v, c](double a, const char*) {
    const double g = a - c;
    if (g <= 0.0) {
      return 0.0;
    }
    const double x_lo = std::max(u.lo, g / v.hi);
    const double x_hi = std::min(u.hi, g / v.lo);
    if (!(x_hi > x_lo)) {
      return 0.0;
    }
    if (u.quantile && u.cdf) {
      const double p_lo = u.cdf(x_lo);
      const double p_hi = u.cdf(x_hi);
      auto integrand = [&](double p) {
        const double x = u.quantile(p);
        return v.density(std::clamp(g / x, v.lo, v.hi)) / x;
      };
      return numeric::integrate(integrand, p_lo, p_hi, kInnerQuad);
    }
    auto integrand = [&](double x) {
      return u.density(x) * v.density(std::clamp(g / x, v.lo, v.hi)) / x;
    };
    return numeric::integrate(integrand, x_lo, x_hi, kInnerQuad);
  };

  PiecewisePdf pdf(layout_segments(sc, c, G0, G1, G2, G3, tau), "product");
  return {std::move(pdf), sc, G0 + c, G1 + c, G2 + c, G3 + c};
}

namespace tau {

double tau1(double x, double theta_m, double alpha_m) {
  const double ct = std::cos(theta_m);
  const double lo2 = (1.0 - alpha_m) / 2.0;
  const double r = x / ct;
  const double num = r + std::sqrt(std::max(r * r - x * x, 0.0));
  const double den = lo2 + std::sqrt(std::max(lo2 * lo2 - x * x, 0.0));
  return std::log(num / den) / (theta_m * alpha_m);
}

double tau2(double x, double theta_m, double alpha_m) {
  const double lo2 = (1.0 - alpha_m) / 2.0;
  const double hi2 = (1.0 + alpha_m) / 2.0;
  const double num = hi2 + std::sqrt(std::max(hi2 * hi2 - x * x, 0.0));
  const double den = lo2 + std::sqrt(std::max(lo2 * lo2 - x * x, 0.0));
  return std::log(num / den) / (theta_m * alpha_m);
}

double tau3(double x, double theta_m, double alpha_m) {
  const double r = (1.0 + alpha_m) / (2.0 * x);
  return std::log(r + std::sqrt(std::max(r * r - 1.0, 0.0))) / (theta_m * alpha_m);
}

double tau4(double theta_m, double alpha_m) {
  const double ct = std::cos(theta_m);
  return std::log(1.0 / ct + std::sqrt(1.0 / (ct * ct) - 1.0)) / (theta_m * alpha_m);
}

}  // namespace tau

ProductPdfResult example_tau_segments(double theta_m, double alpha_m, double equal_rel_tol) {
  if (!(theta_m > 0.0 && theta_m < std::numbers::pi / 2)) {
    throw PdfError("theta_m must lie in (0, pi/2)");
  }
  if (!(alpha_m > 0.0 && alpha_m < 1.0)) {
    throw PdfError("alpha_m must lie in (0, 1)");
  }
  const double c = 0.5;
  const double gmin1 = std::cos(theta_m);
  const double gmax1 = 1.0;
  const double gmin2 = (1.0 - alpha_m) / 2.0;
  const double gmax2 = (1.0 + alpha_m) / 2.0;
  const double G0 = gmin1 * gmin2;
  const double G1 = gmin1 * gmax2;
  const double G2 = gmax1 * gmin2;
  const double G3 = gmax1 * gmax2;
  const Subcase sc = select_subcase(G1, G2, equal_rel_tol);

  auto dens = [theta_m, alpha_m, c](double a, const char* label) {
    const double x = a - c;
    const std::string_view l(label);
    if (l == "tau1") {
      return tau::tau1(x, theta_m, alpha_m);
    }
    if (l == "tau2") {
      return tau::tau2(x, theta_m, alpha_m);
    }
    if (l == "tau3") {
      return tau::tau3(x, theta_m, alpha_m);
    }
    return tau::tau4(theta_m, alpha_m);
  };
  PiecewisePdf pdf(layout_segments(sc, c, G0, G1, G2, G3, dens), "worked_example_closed_form");
  return {std::move(pdf), sc, G0 + c, G1 + c, G2 + c, G3 + c};
}

PiecewisePdf uniform_pdf(double lo, double hi) {
  if (!(hi > lo)) {
    throw PdfError("uniform pdf needs hi > lo");
  }
  const double w = hi - lo;
  return PiecewisePdf({Segment{lo, hi, [w](double) { return 1.0 / w; }, "uniform"}}, "uniform", 1e-8,
                      4);
}

}  // namespace phyauth
