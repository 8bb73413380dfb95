#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "optomech/errors.hpp"

namespace optomech {

/// Step and convergence policy for the time-domain integrals.
struct QuadratureConfig {
  double base_step = 0.02;  // in units of 1/omega_m
  int refine_factor = 2;
  double tolerance = 1e-9;

  void validate() const {
    if (!(base_step > 0.0)) throw std::invalid_argument("QuadratureConfig: base_step must be > 0");
    if (refine_factor < 2) throw std::invalid_argument("QuadratureConfig: refine_factor must be >= 2");
    if (!(tolerance > 0.0) || tolerance > 1e-4)
      throw std::invalid_argument("QuadratureConfig: tolerance must lie in (0, 1e-4]");
  }

  // base_step <= min(1, 1/gamma)/50
  void validate_for_rate(double gamma) const {
    validate();
    const double cap = std::min(1.0, 1.0 / gamma) / 50.0;
    if (base_step > cap * (1.0 + 1e-12))
      throw std::invalid_argument("QuadratureConfig: base_step exceeds min(1, 1/gamma)/50");
  }

  static QuadratureConfig for_rate(double gamma) {
    QuadratureConfig q;
    q.base_step = std::min(1.0, 1.0 / gamma) / 50.0;
    return q;
  }
};

namespace detail {

inline int even_intervals(double length, double step, int minimum = 2) {
  int n = static_cast<int>(std::ceil(length / step));
  n = std::max(n, minimum);
  if (n % 2 != 0) ++n;
  return n;
}

// Composite Simpson for a vector-valued integrand f: double -> VectorXcd.
template <class F>
Eigen::VectorXcd composite_simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  Eigen::VectorXcd acc = f(a) + f(b);
  for (int i = 1; i < n; i += 2) acc += 4.0 * f(a + i * h);
  for (int i = 2; i < n; i += 2) acc += 2.0 * f(a + i * h);
  return acc * (h / 3.0);
}

// Simpson with refinement: the interval count is multiplied by
// `refine_factor` until the componentwise change drops below tolerance, then
// the last two levels are Richardson-extrapolated.
template <class F>
Eigen::VectorXcd simpson_adaptive(F&& f, double a, double b, const QuadratureConfig& q,
                                  int max_levels = 10) {
  if (!(b > a)) return Eigen::VectorXcd::Zero(f(a).size());
  int n = even_intervals(b - a, q.base_step);
  Eigen::VectorXcd prev = composite_simpson(f, a, b, n);
  const double r4 = std::pow(double(q.refine_factor), 4);
  for (int level = 0; level < max_levels; ++level) {
    n *= q.refine_factor;
    Eigen::VectorXcd cur = composite_simpson(f, a, b, n);
    const double diff = (cur - prev).cwiseAbs().maxCoeff();
    if (diff <= q.tolerance) return cur + (cur - prev) / (r4 - 1.0);
    prev.swap(cur);
  }
  throw QuadratureError("quadrature did not converge to " + std::to_string(q.tolerance) +
                        " on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
}

template <class F>
double simpson_adaptive_scalar(F&& f, double a, double b, const QuadratureConfig& q,
                               int max_levels = 10) {
  auto wrapped = [&f](double t) {
    Eigen::VectorXcd v(1);
    v[0] = f(t);
    return v;
  };
  return simpson_adaptive(wrapped, a, b, q, max_levels)[0].real();
}

}  // namespace detail
}  // namespace optomech
