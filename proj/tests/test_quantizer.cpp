// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"
#include "phyauth/iqi_signal.hpp"
#include "phyauth/quantizer.hpp"

#include <doctest.h>

#include <numbers>

using namespace phyauth;

namespace {
constexpr double kTm = 5 * std::numbers::pi / 36;
constexpr double kAm = 0.04;

const PiecewisePdf& example_pdf() {
  static const PiecewisePdf pdf =
      population_pdf(CompositeParamSpec::worked_example(), {kTm, kAm});
  return pdf;
}
}  // namespace

TEST_CASE("case 1 boundaries are evenly spaced") {
  const auto q = build_case1(0.3, 6);
  REQUIRE(q.M() == 6);
  for (std::size_t m = 0; m <= 6; ++m) {
    CHECK(q.boundaries()[m] == doctest::Approx((2.0 * m / 6.0 - 1.0) * 0.3).epsilon(1e-15));
  }
  CHECK(q.levels()[0] == doctest::Approx(-0.25));
  CHECK(q.kind() == "meb_case1");
}

TEST_CASE("case 2 boundaries split the worked-example law into equal masses") {
  for (std::size_t M : {20u, 500u}) {
    const auto q = build_case2(example_pdf(), M);
    REQUIRE(q.M() == M);
    CHECK(q.boundaries().front() == example_pdf().lo());
    CHECK(q.boundaries().back() == example_pdf().hi());
    // Independent cdf: straight from (alpha, theta).
    for (std::size_t m = 0; m <= M; m += (M == 20 ? 1 : 25)) {
      CAPTURE(m);
      CHECK(oracle::worked_example_cdf(q.boundaries()[m], kTm, kAm) ==
            doctest::Approx(static_cast<double>(m) / M).epsilon(1e-8));
    }
    for (double mass : interval_masses(q, example_pdf())) {
      CHECK(std::abs(mass - 1.0 / M) < 1e-9);
    }
    CHECK(entropy(q, example_pdf()) == doctest::Approx(std::log2(double(M))).epsilon(1e-9));
  }
}

TEST_CASE("quantize: ties go right, last interval closed, outside values clamp") {
  const QuantizerSpec q({0.0, 1.0, 2.0, 3.0});
  CHECK(quantize(q, 0.5).index == 0);
  CHECK(quantize(q, 1.0).index == 1);
  CHECK(quantize(q, 2.0).index == 2);
  CHECK(quantize(q, 3.0).index == 2);
  CHECK(quantize(q, -7.0).index == 0);
  CHECK(quantize(q, 9.0).index == 2);
  CHECK(quantize(q, 2.2).level == doctest::Approx(2.5));
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(QuantizerSpec({0.0}), QuantizerError);
  CHECK_THROWS_AS(QuantizerSpec({0.0, 1.0, 1.0}), QuantizerError);
  CHECK_THROWS_AS(QuantizerSpec({0.0, 2.0, 1.0}), QuantizerError);
  CHECK_THROWS_AS(QuantizerSpec({0.0, 1.0}, {1.0}), QuantizerError);
  CHECK_THROWS_AS(QuantizerSpec({0.0, 1.0}, {1.5}), QuantizerError);
  CHECK_THROWS_AS(build_case2(example_pdf(), 0), QuantizerError);
}

TEST_CASE("json round trip keeps the partition and version") {
  const QuantizerSpec q({0.0, 0.25, 1.0}, {0.5}, "pdf-x", 4, "custom");
  const auto back = QuantizerSpec::from_json(q.to_json());
  CHECK(back.boundaries() == q.boundaries());
  CHECK(back.inserted() == q.inserted());
  CHECK(back.edges() == q.edges());
  CHECK(back.version() == 4);
  CHECK(back.pdf_ref() == "pdf-x");
}

TEST_CASE("insertion entropy matches a direct sum") {
  for (auto [M, C] : {std::pair{20.0, 40.0}, {20.0, 30.0}, {500.0, 750.0}}) {
    const double D = 1.0 / (1.0 / M - 1.0 / C);
    double h = (M - 1.0) * (1.0 / M) * std::log2(M);
    h += std::log2(C) / C + std::log2(D) / D;
    CHECK(insertion_entropy(M, C, D) == doctest::Approx(h).epsilon(1e-13));
    CHECK(insertion_entropy(M, C, D) > std::log2(M));
  }
}

TEST_CASE("PHY-ID vectors") {
  // SHA-256(BE64(bits of 1.0) || BE32(1)), computed with an external hashlib.
  CHECK(phy_id(1.0, 1).hex == "6e7c382a117a894960a53ef40ee9e1c76c2ed0401697e7961565bff61e222168");
  CHECK(phy_id(0.98, 3, 1e-9).hex ==
        "77c2df0f4609c491238ec1cb66a454976d2d67e9e799bd88c6df5c7002952e6c");
  CHECK(phy_id(1.0, 1) == phy_id_from_hex(phy_id(1.0, 1).hex));
  CHECK_FALSE(phy_id(1.0, 1) == phy_id(1.0, 2));
  CHECK_THROWS_AS(phy_id_from_hex("abc"), QuantizerError);
  CHECK_THROWS_AS(phy_id_from_hex(std::string(64, 'G')), QuantizerError);
}

TEST_CASE("sub-boundary insertion separates two values in one interval") {
  const auto q = build_case2(example_pdf(), 20);
  const double a = q.levels()[7] - 1e-5, b = q.levels()[7] + 1e-5;
  REQUIRE(quantize(q, a).index == quantize(q, b).index);
  const auto q2 = insert_sub_boundary(q, a, b);
  CHECK(q2.version() == q.version() + 1);
  CHECK(q2.interval_count() == 21);
  CHECK(q2.M() == 20);
  CHECK(quantize(q2, a).index != quantize(q2, b).index);
  CHECK_THROWS_AS(insert_sub_boundary(q, q.levels()[1], q.levels()[2]), QuantizerError);
}
