#include "avgcost/cli/sampling.hpp"

#include <vector>

namespace avgcost::cli {

double ProfileSampler::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53 * upper_;
}

DemandProfile ProfileSampler::profile(std::size_t n) {
  std::vector<double> q(n);
  for (auto& x : q) x = uniform();
  return DemandProfile(std::move(q));
}

DemandProfile ProfileSampler::uniform_profile(std::size_t n) {
  return DemandProfile(std::vector<double>(n, uniform()));
}

}  // namespace avgcost::cli
