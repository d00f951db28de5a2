// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace phyauth {

using Rng = std::mt19937_64;

// Labeled sub-streams off one master seed. Adding a new label never shifts
// the draws of an existing one.
class RngStreams {
public:
  explicit RngStreams(std::uint64_t master_seed) : seed_(master_seed) {}

  Rng stream(std::string_view label) const;
  Rng stream(std::string_view label, std::uint64_t index) const;

  std::uint64_t master_seed() const { return seed_; }

private:
  std::uint64_t seed_;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace phyauth
