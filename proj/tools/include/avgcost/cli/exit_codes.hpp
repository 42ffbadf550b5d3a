#pragma once

namespace avgcost::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitPropertyViolation = 4;

}  // namespace avgcost::cli
