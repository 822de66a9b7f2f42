#pragma once

#include <zint/osc.hpp>
#include <zint/quad.hpp>

#include <cmath>

namespace ztest {

// Worked oscillatory integrands from the examples, with compensated phase so
// window quadrature near u ~ 1e-7 is not limited by division rounding.
inline zint::Integrand ex1_integrand() {
  zint::Integrand g;
  g.eval = [](double u) { return zint::osc::sin_recip(u) / (u * u); };
  g.domain = {0.0, 1.0, true, false};
  g.oscillation_hint = [](double u) { return 1.0 / (u * u); };
  return g;
}

// G(u) = cos(1/u) + const; base point 1 here.
inline zint::Antiderivative ex1_antiderivative() {
  return zint::Antiderivative::closed_form(
      1.0, [](double u) { return zint::osc::cos_recip(u) - std::cos(1.0); });
}

inline zint::Integrand ex2_integrand() {
  zint::Integrand g;
  g.eval = [](double u) { return zint::osc::cos_recip(u) / (u * u * u); };
  g.domain = {0.0, 1.0, true, false};
  g.oscillation_hint = [](double u) { return 1.0 / (u * u); };
  return g;
}

// G(u) = -cos(1/u) - sin(1/u)/u + const; base point 1.
inline zint::Antiderivative ex2_antiderivative() {
  return zint::Antiderivative::closed_form(1.0, [](double u) {
    return -zint::osc::cos_recip(u) - zint::osc::sin_recip(u) / u + std::cos(1.0) + std::sin(1.0);
  });
}

constexpr double kCos1 = 0.5403023058681398;
constexpr double kSin1 = 0.8414709848078965;

}  // namespace ztest
