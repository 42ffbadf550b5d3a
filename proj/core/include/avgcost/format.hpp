#pragma once

#include <string>

namespace avgcost {

/// Shortest decimal text that round-trips to the same double ("nan", "inf"
/// for non-finite values). Locale independent.
std::string format_double(double x);

}  // namespace avgcost
