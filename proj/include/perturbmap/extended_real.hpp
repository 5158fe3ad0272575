#pragma once

#include <cmath>
#include <limits>

namespace perturbmap {

// Scores live in R u {-inf}; -inf marks forbidden configurations. The sentinel
// is only ever assigned explicitly -- callers branch on is_neg_inf() before
// doing arithmetic, so it cannot be produced by overflow or propagate through
// float ops unnoticed.
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline bool is_neg_inf(double v) { return std::isinf(v) && v < 0.0; }

}  // namespace perturbmap
