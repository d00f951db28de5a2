// SPDX-License-Identifier: Apache-2.0

#include "phyauth/quantizer.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

namespace phyauth {

QuantizerSpec::QuantizerSpec(std::vector<double> boundaries, std::vector<double> inserted,
                             std::string pdf_ref, std::uint32_t version, std::string kind)
    : boundaries_(std::move(boundaries)),
      inserted_(std::move(inserted)),
      pdf_ref_(std::move(pdf_ref)),
      version_(version),
      kind_(std::move(kind)) {
  if (boundaries_.size() < 2) {
    throw QuantizerError("quantizer needs at least two boundaries");
  }
  for (std::size_t i = 1; i < boundaries_.size(); ++i) {
    if (!(boundaries_[i] > boundaries_[i - 1])) {
      throw QuantizerError("boundaries must be strictly increasing (index " + std::to_string(i) +
                           ")");
    }
  }
  std::sort(inserted_.begin(), inserted_.end());
  for (double b : inserted_) {
    if (!(b > boundaries_.front() && b < boundaries_.back())) {
      throw QuantizerError("sub-boundary outside the support");
    }
  }
  edges_ = boundaries_;
  edges_.insert(edges_.end(), inserted_.begin(), inserted_.end());
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw QuantizerError("sub-boundary duplicates an existing edge");
  }
  levels_.resize(edges_.size() - 1);
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
    levels_[i] = 0.5 * (edges_[i] + edges_[i + 1]);
  }
}

nlohmann::json QuantizerSpec::to_json() const {
  return {{"kind", kind_},         {"version", version_}, {"pdf_ref", pdf_ref_},
          {"M", M()},              {"boundaries", boundaries_}, {"inserted", inserted_},
          {"levels", levels_}};
}

QuantizerSpec QuantizerSpec::from_json(const nlohmann::json& j) {
  return QuantizerSpec(j.at("boundaries").get<std::vector<double>>(),
                       j.value("inserted", std::vector<double>{}), j.value("pdf_ref", std::string{}),
                       j.value("version", 1u), j.value("kind", std::string("custom")));
}

QuantizerSpec build_case1(double a_max, std::size_t M) {
  if (M < 2) {
    throw QuantizerError("M must be at least 2");
  }
  if (!(a_max > 0.0)) {
    throw QuantizerError("a_max must be positive");
  }
  std::vector<double> b(M + 1);
  for (std::size_t m = 0; m <= M; ++m) {
    b[m] = (2.0 * static_cast<double>(m) / static_cast<double>(M) - 1.0) * a_max;
  }
  b.front() = -a_max;
  b.back() = a_max;
  return QuantizerSpec(std::move(b), {}, "uniform", 1, "meb_case1");
}

QuantizerSpec build_case2(const PiecewisePdf& pdf, std::size_t M) {
  if (M < 2) {
    throw QuantizerError("M must be at least 2");
  }
  const double step = 1.0 / static_cast<double>(M);
  std::vector<double> b(M + 1);
  b[0] = pdf.lo();
  for (std::size_t m = 0; m + 1 < M; ++m) {
    b[m + 1] = pdf.inverse_cdf(step + pdf.cdf(b[m]));
  }
  b[M] = pdf.hi();
  return QuantizerSpec(std::move(b), {}, pdf.id(), 1, "meb_case2");
}

QuantizeResult quantize(const QuantizerSpec& spec, double a_hat) {
  const auto& e = spec.edges();
  // Interior edges only: anything below e[1] is interval 0, anything at or
  // above the last interior edge is the final interval.
  auto it = std::upper_bound(e.begin() + 1, e.end() - 1, a_hat);
  const std::size_t idx = static_cast<std::size_t>(it - (e.begin() + 1));
  return {idx, spec.levels()[idx]};
}

std::vector<double> interval_masses(const QuantizerSpec& spec, const PiecewisePdf& pdf) {
  const auto& e = spec.edges();
  std::vector<double> out(e.size() - 1);
  double prev = pdf.cdf(e.front());
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    const double next = pdf.cdf(e[i + 1]);
    out[i] = next - prev;
    prev = next;
  }
  return out;
}

double entropy(const QuantizerSpec& spec, const PiecewisePdf& pdf) {
  double h = 0.0;
  for (double p : interval_masses(spec, pdf)) {
    if (p > 0.0) {
      h -= p * std::log2(p);
    }
  }
  return h;
}

double insertion_entropy(double M, double C, double D) {
  return (1.0 - 1.0 / M) * std::log2(M) + std::log2(C) / C + std::log2(D) / D;
}

namespace {

constexpr char kHex[] = "0123456789abcdef";

std::string to_hex(const std::uint8_t* p, std::size_t n) {
  std::string s(2 * n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    s[2 * i] = kHex[p[i] >> 4];
    s[2 * i + 1] = kHex[p[i] & 0xf];
  }
  return s;
}

}  // namespace

PhyId phy_id(double level, std::uint32_t spec_version, double epsilon) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(level + epsilon);
  std::uint8_t msg[12];
  for (int i = 0; i < 8; ++i) {
    msg[i] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
  }
  for (int i = 0; i < 4; ++i) {
    msg[8 + i] = static_cast<std::uint8_t>(spec_version >> (24 - 8 * i));
  }
  PhyId id;
  SHA256(msg, sizeof msg, id.digest.data());
  id.hex = to_hex(id.digest.data(), id.digest.size());
  return id;
}

PhyId phy_id_from_hex(const std::string& hex) {
  if (hex.size() != 64) {
    throw QuantizerError("PHY-ID hex must be 64 characters");
  }
  PhyId id;
  for (std::size_t i = 0; i < 32; ++i) {
    int v = 0;
    for (int k = 0; k < 2; ++k) {
      const char c = hex[2 * i + k];
      int d;
      if (c >= '0' && c <= '9') {
        d = c - '0';
      } else if (c >= 'a' && c <= 'f') {
        d = c - 'a' + 10;
      } else {
        throw QuantizerError("PHY-ID hex must be lowercase hexadecimal");
      }
      v = v * 16 + d;
    }
    id.digest[i] = static_cast<std::uint8_t>(v);
  }
  id.hex = hex;
  return id;
}

QuantizerSpec insert_sub_boundary(const QuantizerSpec& spec, double a_A, double a_B) {
  if (a_A == a_B) {
    throw QuantizerError("cannot separate identical values");
  }
  const auto qa = quantize(spec, a_A);
  const auto qb = quantize(spec, a_B);
  if (qa.index != qb.index) {
    throw QuantizerError("values already lie in different intervals");
  }
  const double b = 0.5 * (a_A + a_B);
  if (!(b > spec.edges()[qa.index] && b < spec.edges()[qa.index + 1])) {
    throw QuantizerError("midpoint does not fall strictly inside the shared interval");
  }
  std::vector<double> ins = spec.inserted();
  ins.push_back(b);
  return QuantizerSpec(spec.boundaries(), std::move(ins), spec.pdf_ref(), spec.version() + 1,
                       spec.kind());
}

}  // namespace phyauth
