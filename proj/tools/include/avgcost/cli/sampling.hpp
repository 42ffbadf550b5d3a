#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "avgcost/market.hpp"

namespace avgcost::cli {

/// Seeded source of random demand profiles, uniform on [0, upper]^N.
///
/// Uses std::mt19937_64 (fully specified by the standard) and converts the
/// top 53 bits by hand, so a seed yields the same profiles everywhere.
class ProfileSampler {
 public:
  explicit ProfileSampler(std::uint64_t seed, double upper = 10.0) : engine_(seed), upper_(upper) {}

  double uniform();
  DemandProfile profile(std::size_t n);
  /// All entries equal to one uniform draw.
  DemandProfile uniform_profile(std::size_t n);

 private:
  std::mt19937_64 engine_;
  double upper_;
};

}  // namespace avgcost::cli
