#pragma once

#include <cmath>

namespace bahadur {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

/// Standard normal density.
inline double normal_pdf(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

/// Standard normal CDF, erfc-based so both tails stay accurate.
inline double normal_cdf(double t) {
  return 0.5 * std::erfc(-t * 0.7071067811865475244008444);
}

}  // namespace bahadur
