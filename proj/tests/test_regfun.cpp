#include <zint/quad.hpp>
#include <zint/regfun.hpp>

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace zint;

namespace {

double sup_diff_w(const InitializationFn& a, const InitializationFn& b, double lo, double hi,
                  int n = 512) {
  double sup = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = lo + (hi - lo) * (i + 0.5) / n;
    sup = std::max(sup, std::abs(a.w(v) - b.w(v)));
  }
  return sup;
}

double sup_diff_wp(const InitializationFn& a, const InitializationFn& b, double lo, double hi,
                   int n = 512) {
  double sup = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double v = lo + (hi - lo) * i / n;
    sup = std::max(sup, std::abs(a.w_prime(v) - b.w_prime(v)));
  }
  return sup;
}

}  // namespace

TEST_CASE("linear ramp: worked values") {
  const InitializationFn w = make_linear_ramp();
  CHECK(w.epsilon() == 0.5);
  CHECK(w.w(0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w.w(0.25) == 0.0);
  CHECK(w.w(1.0) == 1.0);
  const Integrand wp{[&](double v) { return w.w_prime(v); }, {}, w.breakpoints(), {}};
  CHECK(integrate_proper(wp, 0.5, 1.0, 1e-13).value == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(validate_initialization(w, 1e-10).passed);
}

TEST_CASE("smoothstep: worked values and endpoint derivatives") {
  const InitializationFn w = make_smoothstep();
  CHECK(w.w(0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w.w_prime(0.5) == 0.0);
  CHECK(w.w_prime(1.0) == 0.0);
  CHECK(w.w_prime(0.75) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(validate_initialization(w, 1e-10).passed);
}

TEST_CASE("validate_initialization flags a doubled derivative") {
  const InitializationFn bad = InitializationFn::closed(
      0.5,
      [](double v) {
        if (v <= 0.5) return 0.0;
        if (v >= 1.0) return 1.0;
        return 2.0 * v - 1.0;
      },
      [](double v) {
        if (v < 0.5 || v > 1.0) return 0.0;
        return 4.0;  // doubled
      },
      {});
  const ValidationReport rep = validate_initialization(bad, 1e-10);
  CHECK_FALSE(rep.passed);
  bool found = false;
  for (const auto& c : rep.checks)
    if (c.name.find("normalization") != std::string::npos) {
      found = true;
      CHECK_FALSE(c.passed);
      CHECK(c.measured == doctest::Approx(1.0).epsilon(1e-9));  // |2 - 1|
    }
  CHECK(found);
}

TEST_CASE("combine_init: ramp (.) ramp has the closed form 4 ln(4v) / 4 ln(1/v)") {
  const InitializationFn w = combine_init(make_linear_ramp(), make_linear_ramp());
  CHECK(w.epsilon() == 0.25);
  CHECK(w.repr() == FnRepr::tabulated_grid);
  for (int i = 0; i < 64; ++i) {
    const double v = 0.25 + 0.75 * (i + 0.5) / 64;
    const double expect = v <= 0.5 ? 4.0 * std::log(4.0 * v) : 4.0 * std::log(1.0 / v);
    CHECK(std::abs(w.w_prime(v) - expect) < 1e-6);
  }
  CHECK(validate_initialization(w, 1e-8).passed);
}

TEST_CASE("combine_init: normalization against the iterated double-integral oracle") {
  const InitializationFn w1 = make_linear_ramp();
  const InitializationFn w2 = make_linear_ramp();
  // Oracle: integral over v of integral over v' of w1'(v/v') w2'(v')/v',
  // evaluated with nested adaptive quadrature, independent of the tabulation.
  Integrand outer;
  outer.eval = [&](double v) {
    const double lo = std::max(0.5, v);
    const double hi = std::min(1.0, 2.0 * v);
    if (!(lo < hi)) return 0.0;
    Integrand inner;
    inner.eval = [&, v](double vp) { return w1.w_prime(v / vp) * w2.w_prime(vp) / vp; };
    return integrate_proper(inner, lo, hi, 1e-12).value;
  };
  outer.breakpoints = {0.5};
  const double oracle = integrate_proper(outer, 0.25, 1.0, 1e-10).value;
  CHECK(std::abs(oracle - 1.0) < 1e-8);

  const InitializationFn combined = combine_init(w1, w2);
  const Integrand wp{[&](double v) { return combined.w_prime(v); }, {}, combined.breakpoints(), {}};
  CHECK(std::abs(integrate_proper(wp, 0.25, 1.0, 1e-10).value - 1.0) < 1e-8);
}

TEST_CASE("combine_init: commutative and epsilon multiplies") {
  const InitializationFn a = combine_init(make_linear_ramp(), make_smoothstep());
  const InitializationFn b = combine_init(make_smoothstep(), make_linear_ramp());
  CHECK(a.epsilon() == 0.25);
  CHECK(b.epsilon() == 0.25);
  CHECK(sup_diff_wp(a, b, 0.25, 1.0) < 1e-6);
  CHECK(validate_initialization(a, 1e-8).passed);
}

TEST_CASE("z_from_w: exponential-map conversion of the ramp") {
  const TerminationFn z = z_from_w(make_linear_ramp(), 1.0);
  CHECK(z.c() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // closed form z(x) = 2 e^{-x} - 1 on [0, ln 2]
  CHECK(z.z(std::log(4.0 / 3.0)) == doctest::Approx(0.5).epsilon(1e-14));
  const Integrand zp{[&](double x) { return z.z_prime(x); }, {}, z.breakpoints(), {}};
  CHECK(integrate_proper(zp, 0.0, z.c(), 1e-13).value == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(validate_termination(z, 1e-9).passed);
}

TEST_CASE("z_from_w: smoothstep with alpha = 2") {
  const TerminationFn z = z_from_w(make_smoothstep(), 2.0);
  CHECK(z.c() == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
  CHECK(validate_termination(z, 1e-9).passed);
}

TEST_CASE("validate_termination flags broken support") {
  const TerminationFn bad = TerminationFn::closed(
      0.1, [](double x) { return x <= 0.0 ? 1.0 : std::exp(-x); },
      [](double x) { return x <= 0.0 ? 0.0 : -std::exp(-x); }, {});
  const ValidationReport rep = validate_termination(bad, 1e-9);
  CHECK_FALSE(rep.passed);
  bool support_failed = false;
  for (const auto& c : rep.checks)
    if (c.name.find("zero beyond c") != std::string::npos && !c.passed) support_failed = true;
  CHECK(support_failed);
}

TEST_CASE("round trip w -> z -> w is the identity") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (const InitializationFn& w : {make_linear_ramp(), make_smoothstep()}) {
      const InitializationFn back = w_from_z(z_from_w(w, alpha), alpha);
      CHECK(back.epsilon() == doctest::Approx(w.epsilon()).epsilon(1e-14));
      CHECK(sup_diff_w(w, back, w.epsilon(), 1.0) < 1e-10);
    }
    const InitializationFn tab = combine_init(make_linear_ramp(), make_linear_ramp());
    const InitializationFn back = w_from_z(z_from_w(tab, alpha), alpha);
    CHECK(sup_diff_w(tab, back, tab.epsilon(), 1.0) < 1e-6);
  }
}

TEST_CASE("w_from_z: epsilon from the support length, domain error at u = 0") {
  const TerminationFn z = z_from_w(make_linear_ramp(), 1.0);
  TerminationFn z_ln2 = TerminationFn::closed(
      std::log(2.0), [&](double x) { return z.z(x); }, [&](double x) { return z.z_prime(x); },
      z.breakpoints());
  const InitializationFn w = w_from_z(z_ln2, 1.0);
  CHECK(w.epsilon() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(w.w_prime(0.0), DomainError);
  // normalization preserved
  const Integrand wp{[&](double v) { return w.w_prime(v); }, {}, w.breakpoints(), {}};
  CHECK(integrate_proper(wp, w.epsilon(), 1.0, 1e-12).value ==
        doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("tabulated JSON round trip is bit-exact") {
  const InitializationFn w = combine_init(make_linear_ramp(), make_smoothstep());
  const std::string text = to_json(w);
  const InitializationFn back = initialization_from_json(text);
  REQUIRE(back.nodes().size() == w.nodes().size());
  CHECK(std::memcmp(back.nodes().data(), w.nodes().data(),
                    w.nodes().size() * sizeof(double)) == 0);
  CHECK(std::memcmp(back.values().data(), w.values().data(),
                    w.values().size() * sizeof(double)) == 0);
  CHECK(back.epsilon() == w.epsilon());
  CHECK(to_json(back) == text);
  CHECK_THROWS(to_json(make_linear_ramp()));
}
