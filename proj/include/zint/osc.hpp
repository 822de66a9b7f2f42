#pragma once

#include <cmath>

namespace zint::osc {

// Trig of y/u with the division rounding compensated: the naive double
// quotient carries an absolute phase error of ~(y/u)*eps, which dominates the
// value of window integrals once 1/u is large.  Splitting the quotient with an
// fma residual restores the mathematically exact phase to ~1 ulp.
inline double sin_ratio(double y, double u) {
  const double r = y / u;
  const double rl = std::fma(-r, u, y) / u;
  return std::sin(r) + std::cos(r) * rl;
}

inline double cos_ratio(double y, double u) {
  const double r = y / u;
  const double rl = std::fma(-r, u, y) / u;
  return std::cos(r) - std::sin(r) * rl;
}

inline double sin_recip(double u) { return sin_ratio(1.0, u); }
inline double cos_recip(double u) { return cos_ratio(1.0, u); }

}  // namespace zint::osc
