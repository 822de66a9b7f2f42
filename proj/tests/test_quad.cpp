#include <zint/osc.hpp>
#include <zint/quad.hpp>

#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>
#include <vector>

using namespace zint;

namespace {

Integrand plain(std::function<double(double)> f) {
  Integrand g;
  g.eval = std::move(f);
  return g;
}

// Closed form of int_{d/2}^{d} cos(1/u) du via the large-argument Si expansion:
// Si(1/u) = pi/2 - u cos(1/u) - u^2 sin(1/u) + 2 u^3 cos(1/u) + O(u^4).
double cos_window_oracle(double d) {
  auto endpoint = [](double u) {
    return -u * u * osc::sin_recip(u) + 2.0 * u * u * u * osc::cos_recip(u);
  };
  return endpoint(d) - endpoint(0.5 * d);
}

}  // namespace

TEST_CASE("integrate_proper: polynomial and trig basics") {
  CHECK(integrate_proper(plain([](double u) { return u; }), 0.0, 1.0, 1e-12).value ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(integrate_proper(plain([](double x) { return std::sin(x); }), 0.0,
                         3.141592653589793, 1e-12)
            .value == doctest::Approx(2.0).epsilon(1e-12));
  // reversed bounds flip the sign
  CHECK(integrate_proper(plain([](double u) { return u; }), 1.0, 0.0, 1e-12).value ==
        doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("integrate_proper: splits at breakpoints") {
  Integrand f = plain([](double u) { return std::abs(u - 0.5); });
  f.breakpoints = {0.5};
  const QuadResult r = integrate_proper(f, 0.0, 1.0, 1e-13);
  CHECK(r.value == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("integrate_proper: oscillatory window cos(1/u) down to delta = 1e-4") {
  Integrand f = plain([](double u) { return osc::cos_recip(u); });
  f.oscillation_hint = [](double u) { return 1.0 / (u * u); };
  for (double d : {1e-2, 1e-3, 1e-4}) {
    const QuadResult r = integrate_proper(f, 0.5 * d, d, 1e-10, 50'000'000);
    const double oracle = cos_window_oracle(d);
    // oracle remainder is O(d^4)
    CHECK(std::abs(r.value - oracle) <= 1e-10 + 40.0 * d * d * d * d);
    CHECK(std::abs(r.value) < 1.3 * d * d + 1e-10);
  }
}

TEST_CASE("integrate_proper: additivity over a split point") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> mid(0.2, 0.8);
  Integrand f = plain([](double x) { return std::exp(-x) * std::cos(5.0 * x); });
  const double whole = integrate_proper(f, 0.0, 1.0, 1e-12).value;
  for (int i = 0; i < 8; ++i) {
    const double m = mid(rng);
    const double left = integrate_proper(f, 0.0, m, 1e-12).value;
    const double right = integrate_proper(f, m, 1.0, 1e-12).value;
    CHECK(std::abs(left + right - whole) < 5e-12);
  }
}

TEST_CASE("integrate_proper: budget exhaustion raises") {
  Integrand f = plain([](double u) { return osc::cos_recip(u); });
  f.oscillation_hint = [](double u) { return 1.0 / (u * u); };
  CHECK_THROWS_AS(integrate_proper(f, 1e-5, 1e-2, 1e-12, 1000), QuadratureError);
}

TEST_CASE("cumulative: matches closed forms") {
  SUBCASE("cos from 0") {
    Antiderivative F = cumulative(plain([](double x) { return std::cos(x); }), 0.0);
    CHECK(F(1.5707963267948966) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(F(0.0) == 0.0);
  }
  SUBCASE("sin(1/u)/u^2 from 2/pi") {
    Integrand g;
    g.eval = [](double u) { return osc::sin_recip(u) / (u * u); };
    g.oscillation_hint = [](double u) { return 1.0 / (u * u); };
    const double phi = 2.0 / 3.141592653589793;
    Antiderivative G = cumulative(g, phi);
    for (double u : {0.1, 0.5, 1.0}) {
      const double expect = std::cos(1.0 / u) - std::cos(1.0 / phi);
      CHECK(std::abs(G(u) - expect) < 1e-9);
    }
  }
  SUBCASE("cos(1/u)/u^3") {
    Integrand g;
    g.eval = [](double u) { return osc::cos_recip(u) / (u * u * u); };
    g.oscillation_hint = [](double u) { return 1.0 / (u * u); };
    Antiderivative G = cumulative(g, 1.0);
    auto closed = [](double u) { return -std::cos(1.0 / u) - std::sin(1.0 / u) / u; };
    CHECK(std::abs(G(0.2) - (closed(0.2) - closed(1.0))) < 1e-8);
  }
}

TEST_CASE("cumulative: central difference recovers the integrand") {
  Integrand g = plain([](double x) { return std::exp(-x * x); });
  Antiderivative F = cumulative(g, 0.25);
  const double h = 1e-5;
  for (double x : {0.5, 1.0, 2.0}) {
    const double fd = (F(x + h) - F(x - h)) / (2.0 * h);
    CHECK(std::abs(fd - g.eval(x)) < 1e-6 * (1.0 + std::abs(g.eval(x))));
  }
}

TEST_CASE("cumulative: concurrent reads agree with sequential values") {
  Integrand g = plain([](double x) { return std::sin(3.0 * x) + x; });
  Antiderivative F_seq = cumulative(g, 1.0);
  std::vector<double> xs;
  for (int i = 1; i <= 64; ++i) xs.push_back(0.05 * i);
  std::vector<double> want(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) want[i] = F_seq(xs[i]);

  Antiderivative F_par = cumulative(g, 1.0);
  std::vector<double> got(xs.size(), 0.0);
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < xs.size(); i += 4) got[i] = F_par(xs[i]);
    });
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(got[i] == want[i]);
}
