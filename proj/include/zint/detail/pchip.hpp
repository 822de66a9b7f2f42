#pragma once

#include <zint/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace zint::detail {

// Fritsch-Carlson monotone cubic interpolant with exact piecewise integration.
class Pchip {
 public:
  Pchip() = default;

  Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw Error("pchip: need at least two nodes");
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(x_[i + 1] > x_[i])) throw Error("pchip: nodes must be strictly increasing");

    d_.assign(n, 0.0);
    std::vector<double> h(n - 1), s(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      s[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
      d_[0] = d_[1] = s[0];
    } else {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (s[i - 1] * s[i] <= 0.0) {
          d_[i] = 0.0;
        } else {
          const double w1 = 2.0 * h[i] + h[i - 1];
          const double w2 = h[i] + 2.0 * h[i - 1];
          d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
        }
      }
      d_[0] = end_slope(h[0], h[1], s[0], s[1]);
      d_[n - 1] = end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
    }

    cum_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
      cum_[i + 1] = cum_[i] + segment_integral(i);
  }

  double value(double v) const {
    const std::size_t i = find(v);
    const double hseg = x_[i + 1] - x_[i];
    const double t = (v - x_[i]) / hseg;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return y_[i] * h00 + hseg * d_[i] * h10 + y_[i + 1] * h01 + hseg * d_[i + 1] * h11;
  }

  // Integral from the first node to v.
  double integral_from_lo(double v) const {
    const std::size_t i = find(v);
    const double hseg = x_[i + 1] - x_[i];
    const double t = (v - x_[i]) / hseg;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double t4 = t3 * t;
    const double i00 = 0.5 * t4 - t3 + t;
    const double i10 = 0.25 * t4 - (2.0 / 3.0) * t3 + 0.5 * t2;
    const double i01 = -0.5 * t4 + t3;
    const double i11 = 0.25 * t4 - t3 / 3.0;
    const double part =
        hseg * (y_[i] * i00 + hseg * d_[i] * i10 + y_[i + 1] * i01 + hseg * d_[i + 1] * i11);
    return cum_[i] + part;
  }

  double total_integral() const { return cum_.back(); }

  void scale(double s) {
    for (auto& v : y_) v *= s;
    for (auto& v : d_) v *= s;
    for (auto& v : cum_) v *= s;
  }

  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& ys() const { return y_; }

 private:
  static double end_slope(double h0, double h1, double s0, double s1) {
    double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (d * s0 <= 0.0) return 0.0;
    if (std::abs(d) > 3.0 * std::abs(s0)) return 3.0 * s0;
    return d;
  }

  double segment_integral(std::size_t i) const {
    const double hseg = x_[i + 1] - x_[i];
    return hseg * (0.5 * (y_[i] + y_[i + 1]) + hseg * (d_[i] - d_[i + 1]) / 12.0);
  }

  std::size_t find(double v) const {
    if (v <= x_.front()) return 0;
    if (v >= x_.back()) return x_.size() - 2;
    const auto it = std::upper_bound(x_.begin(), x_.end(), v);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
  }

  std::vector<double> x_, y_, d_, cum_;
};

}  // namespace zint::detail
