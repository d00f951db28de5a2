// SPDX-License-Identifier: Apache-2.0
//
// Maximum-entropy quantizers over the composite IQI parameter and the
// PHY-ID derived from a quantization level.

#pragma once

#include "phyauth/pdf_engine.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace phyauth {

class QuantizerError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class QuantizerSpec {
public:
  // boundaries: b_0 < ... < b_M. inserted: sub-boundaries strictly inside
  // (b_0, b_M) and distinct from every b_m.
  QuantizerSpec(std::vector<double> boundaries, std::vector<double> inserted = {},
                std::string pdf_ref = {}, std::uint32_t version = 1, std::string kind = "custom");

  const std::vector<double>& boundaries() const { return boundaries_; }
  const std::vector<double>& inserted() const { return inserted_; }
  // Merged partition: boundaries plus sub-boundaries, sorted.
  const std::vector<double>& edges() const { return edges_; }
  // Interval midpoints over the merged partition.
  const std::vector<double>& levels() const { return levels_; }
  std::size_t M() const { return boundaries_.size() - 1; }
  std::size_t interval_count() const { return edges_.size() - 1; }
  std::uint32_t version() const { return version_; }
  const std::string& pdf_ref() const { return pdf_ref_; }
  const std::string& kind() const { return kind_; }
  double lo() const { return edges_.front(); }
  double hi() const { return edges_.back(); }

  nlohmann::json to_json() const;
  static QuantizerSpec from_json(const nlohmann::json& j);

private:
  std::vector<double> boundaries_;
  std::vector<double> inserted_;
  std::vector<double> edges_;
  std::vector<double> levels_;
  std::string pdf_ref_;
  std::uint32_t version_;
  std::string kind_;
};

// Equal-width boundaries for a parameter uniform on [-a_max, a_max].
QuantizerSpec build_case1(double a_max, std::size_t M);

// b_0 = a_min, b_{m+1} = F^{-1}(1/M + F(b_m)), b_M pinned to a_max.
QuantizerSpec build_case2(const PiecewisePdf& pdf, std::size_t M);

struct QuantizeResult {
  std::size_t index;
  double level;
};

// Half-open [e_m, e_{m+1}); the last interval is closed and values outside
// the support clamp to the edge intervals. A value equal to an interior
// edge goes to the interval on its right.
QuantizeResult quantize(const QuantizerSpec& spec, double a_hat);

std::vector<double> interval_masses(const QuantizerSpec& spec, const PiecewisePdf& pdf);

// Shannon entropy in bits over the merged partition.
double entropy(const QuantizerSpec& spec, const PiecewisePdf& pdf);

// Entropy of an equal-mass M-interval partition after one interval is split
// into pieces of mass 1/C and 1/D (1/C + 1/D = 1/M).
double insertion_entropy(double M, double C, double D);

struct PhyId {
  std::array<std::uint8_t, 32> digest{};
  std::string hex;

  bool operator==(const PhyId& o) const { return digest == o.digest; }
  bool operator<(const PhyId& o) const { return digest < o.digest; }
};

// SHA-256 over the big-endian IEEE-754 bits of (level + epsilon) followed by
// the big-endian 32-bit spec version.
PhyId phy_id(double level, std::uint32_t spec_version, double epsilon = 0.0);

// Parses 64 lowercase hex characters; throws QuantizerError otherwise.
PhyId phy_id_from_hex(const std::string& hex);

// New spec (version + 1) with (a_A + a_B)/2 inserted. Both values must share
// an interval of the current partition.
QuantizerSpec insert_sub_boundary(const QuantizerSpec& spec, double a_A, double a_B);

}  // namespace phyauth
