#pragma once

#include <zint/detail/pchip.hpp>
#include <zint/errors.hpp>
#include <zint/quad.hpp>
#include <zint/regfun.hpp>

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

namespace zint {

// Strictly decreasing positive map u = psi(x) with psi(x) -> 0 as x -> infinity,
// linking finite-limit integrals on (0, beta] to infinite-limit ones on
// [psi^{-1}(beta), inf).
struct ChangeOfVariable {
  std::string id;
  double domain_floor = -std::numeric_limits<double>::infinity();
  std::function<double(double)> psi;
  std::function<double(double)> psi_prime;
  std::function<double(double)> psi_inverse;            // optional; bisection otherwise
  std::function<double(double, double)> psi_ratio;      // optional: psi(x+b)/psi(b)

  double inverse(double u) const;                       // analytic or bisection (1e-13 rel.)
  double ratio(double x, double b) const;               // psi(x+b)/psi(b)
};

ChangeOfVariable make_exp_map(double alpha);    // psi(x) = e^{-alpha x}
ChangeOfVariable make_power_map(double r);      // psi(x) = x^{-r}, x > 0
ChangeOfVariable make_custom_map(std::string id, std::function<double(double)> psi,
                                 std::function<double(double)> psi_prime,
                                 std::function<double(double)> psi_inverse,
                                 double domain_floor);

// Second-type termination function zeta(x, b) induced by an initialization
// function through a change of variable:
//   zeta'(x, b) = w'(psi(x+b)/psi(b)) psi'(x+b)/psi(b)   for x >= 0, else 0,
// supported on [0, e(eps, b)] with e(eps, b) = psi^{-1}(eps psi(b)) - b.
class SecondTypeTermination {
 public:
  SecondTypeTermination() = default;

  double zeta_prime(double x, double b) const;
  double e_of(double b) const;
  double epsilon() const { return impl_->epsilon; }
  const ChangeOfVariable& cov() const { return impl_->cov; }

  // x-locations where zeta'(., b) may be non-smooth, for quadrature splitting.
  std::vector<double> breakpoints(double b) const;

  bool valid_handle() const { return impl_ != nullptr; }

 private:
  struct Impl {
    ChangeOfVariable cov;
    double epsilon = 0.5;
    // direct form
    InitializationFn w;
    bool combined = false;
    // combined form: components plus per-b tabulated slices
    std::shared_ptr<const Impl> lhs, rhs;
    mutable std::map<double, detail::Pchip> slices;
    mutable std::shared_mutex mu;
  };
  std::shared_ptr<const Impl> impl_;

  static double direct_prime(const Impl& im, double x, double b);
  static const detail::Pchip& slice(const Impl& im, double b);

  friend SecondTypeTermination zeta_from_w(const InitializationFn&, const ChangeOfVariable&);
  friend SecondTypeTermination combine_zeta(const SecondTypeTermination&,
                                            const SecondTypeTermination&);
};

SecondTypeTermination zeta_from_w(const InitializationFn& w, const ChangeOfVariable& cov);

// Combination of two second-type termination functions over the same map.
// zeta'(x,b) = -int_0^x zeta1'(x - x', x' + b) zeta2'(x', b) dx'; the base of
// the first factor rides along x' so that the result corresponds to
// combine_init of the sources for every admissible map (for the exponential
// map this reduces to the plain convolution).  Slices are tabulated per b on
// a 1025-node grid.
SecondTypeTermination combine_zeta(const SecondTypeTermination& z1,
                                   const SecondTypeTermination& z2);

// f(t) = -g(psi(t)) psi'(t); the finite upper bound beta = g.domain.hi maps to
// the infinite-limit lower bound psi^{-1}(beta), reported in f.domain.lo.
Integrand transform_integrand(const Integrand& g, const ChangeOfVariable& cov);

// Inverse direction: g(u) = -f(psi^{-1}(u)) / psi'(psi^{-1}(u)) on (0, psi(a)].
Integrand transform_integrand_to_finite(const Integrand& f, double a,
                                        const ChangeOfVariable& cov);

}  // namespace zint
