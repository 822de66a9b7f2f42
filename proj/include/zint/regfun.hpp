#pragma once

#include <zint/detail/pchip.hpp>
#include <zint/errors.hpp>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace zint {

enum class FnRepr { closed_form, tabulated_grid };

// Initialization function w(v): 0 up to the cutoff epsilon, 1 from v = 1 on,
// with unit-mass derivative on [epsilon, 1].  Immutable after construction.
class InitializationFn {
 public:
  InitializationFn() = default;

  static InitializationFn closed(double epsilon, std::function<double(double)> w,
                                 std::function<double(double)> w_prime,
                                 std::vector<double> breakpoints);
  // Node values of w' on a strictly increasing grid spanning [epsilon, 1],
  // interpolated with a monotone cubic.  Values are stored exactly as given.
  static InitializationFn tabulated(double epsilon, std::vector<double> nodes,
                                    std::vector<double> w_prime_values);

  double epsilon() const { return impl_->epsilon; }
  FnRepr repr() const { return impl_->repr; }
  double w(double v) const;
  double w_prime(double v) const;

  // Locations where w' may be non-smooth, including epsilon and 1.
  const std::vector<double>& breakpoints() const { return impl_->breakpoints; }

  // Tabulated representation access (empty vectors for closed forms).
  const std::vector<double>& nodes() const;
  const std::vector<double>& values() const;

  bool valid_handle() const { return impl_ != nullptr; }

 private:
  struct Impl {
    double epsilon = 0.5;
    FnRepr repr = FnRepr::closed_form;
    std::function<double(double)> w;
    std::function<double(double)> w_prime;
    std::vector<double> breakpoints;
    detail::Pchip table;  // tabulated repr only
    std::vector<double> empty;
  };
  std::shared_ptr<const Impl> impl_;
};

// First-type termination function z(x): 1 up to x = 0, 0 from x = c on, with
// integral of z' equal to -1 over the support.
class TerminationFn {
 public:
  TerminationFn() = default;

  static TerminationFn closed(double c, std::function<double(double)> z,
                              std::function<double(double)> z_prime,
                              std::vector<double> breakpoints);

  double c() const { return impl_->c; }
  double z(double x) const { return impl_->z(x); }
  double z_prime(double x) const { return impl_->z_prime(x); }
  const std::vector<double>& breakpoints() const { return impl_->breakpoints; }
  bool valid_handle() const { return impl_ != nullptr; }

 private:
  struct Impl {
    double c = 1.0;
    std::function<double(double)> z;
    std::function<double(double)> z_prime;
    std::vector<double> breakpoints;
  };
  std::shared_ptr<const Impl> impl_;
};

struct ValidationCheck {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct ValidationReport {
  bool passed = false;
  std::vector<ValidationCheck> checks;
};

// The two worked closed forms: a linear ramp w(v) = 2v - 1 on [1/2, 1] and the
// cubic smoothstep w(v) = 3(2v-1)^2 - 2(2v-1)^3 on [1/2, 1].
InitializationFn make_linear_ramp();
InitializationFn make_smoothstep();

ValidationReport validate_initialization(const InitializationFn& w, double tol);
ValidationReport validate_termination(const TerminationFn& z, double tol);

// Combination w1 (.) w2 via the multiplicative convolution of derivatives,
// w'(v) = int_v^1 w1'(v/v') w2'(v') / v' dv'.  Tabulated on n_nodes points over
// [eps1*eps2, 1]; the tabulated derivative is renormalized by its measured
// integral when the defect is below 1e-8 and construction fails otherwise.
InitializationFn combine_init(const InitializationFn& w1, const InitializationFn& w2,
                              std::size_t n_nodes = 1025, double node_tol = 1e-11);

// Explicit conversions through the exponential map psi(x) = e^{-alpha x}:
// z(x) = w(e^{-alpha x}) with c = -ln(epsilon)/alpha, and back.
TerminationFn z_from_w(const InitializationFn& w, double alpha);
InitializationFn w_from_z(const TerminationFn& z, double alpha);

// JSON serialization of the tabulated representation:
// {"epsilon": e, "nodes": [...], "values": [...]}; bit-exact round trip.
std::string to_json(const InitializationFn& w);
InitializationFn initialization_from_json(const std::string& text);

}  // namespace zint
