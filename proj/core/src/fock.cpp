#include "optomech/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "optomech/errors.hpp"

namespace optomech {

TruncationPolicy TruncationPolicy::fixed(int dim) {
  TruncationPolicy p;
  p.mode = Mode::Fixed;
  p.dim = dim;
  p.max_dim = std::max(dim, p.max_dim);
  p.validate();
  return p;
}

TruncationPolicy TruncationPolicy::adaptive(double target_tail_mass, int max_dim) {
  TruncationPolicy p;
  p.mode = Mode::Adaptive;
  p.target_tail_mass = target_tail_mass;
  p.max_dim = max_dim;
  p.validate();
  return p;
}

void TruncationPolicy::validate() const {
  if (mode == Mode::Fixed) {
    if (dim < 1) throw std::invalid_argument("TruncationPolicy: fixed dim must be >= 1");
    if (max_dim < dim) throw std::invalid_argument("TruncationPolicy: max_dim < fixed dim");
  } else {
    if (!(target_tail_mass > 0.0) || target_tail_mass > 1e-6)
      throw std::invalid_argument("TruncationPolicy: target_tail_mass must lie in (0, 1e-6]");
    if (max_dim < 1) throw std::invalid_argument("TruncationPolicy: max_dim must be >= 1");
  }
}

int TruncationPolicy::start_dim(double radius, int extra) const {
  if (mode == Mode::Fixed) return dim;
  const double r = std::abs(radius) + 4.0;
  const int d = static_cast<int>(std::ceil(r * r)) + 8 + extra;
  return std::min(d, max_dim);
}

Complex FockVector::overlap(const FockVector& other) const {
  const int n = std::min(dim(), other.dim());
  return a_.head(n).dot(other.a_.head(n));  // Eigen's dot conjugates the lhs
}

bool FockVector::is_normalized(double tol) const {
  return std::abs(squared_norm() - 1.0) <= tol;
}

FockVector FockVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("FockVector: cannot normalize the zero vector");
  return FockVector(a_ / n);
}

double FockVector::tail_mass(int from) const {
  if (from >= dim()) return 0.0;
  if (from < 0) from = 0;
  return a_.tail(dim() - from).squaredNorm();
}

FockVector FockVector::resized(int new_dim, double max_loss) const {
  if (new_dim < 1) throw std::invalid_argument("FockVector: dim must be >= 1");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(new_dim);
  const int keep = std::min(new_dim, dim());
  out.head(keep) = a_.head(keep);
  if (new_dim < dim() && tail_mass(new_dim) > max_loss)
    throw TruncationError("FockVector: resizing to dim " + std::to_string(new_dim) +
                          " drops " + std::to_string(tail_mass(new_dim)) + " of the mass");
  return FockVector(std::move(out));
}

void FockVector::require_finite() const {
  if (!a_.allFinite()) throw std::invalid_argument("FockVector: amplitudes must be finite");
}

FockVector basis_state(int n, int dim) {
  if (n < 0 || n >= dim) throw std::invalid_argument("basis_state: need 0 <= n < dim");
  FockVector v(dim);
  v[n] = 1.0;
  return v;
}

namespace {

Eigen::VectorXcd coherent_amplitudes(Complex alpha, int dim) {
  Eigen::VectorXcd a(dim);
  a[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) a[n] = a[n - 1] * alpha / std::sqrt(double(n));
  return a;
}

int grown(int dim, int max_dim) { return std::min(max_dim, std::max(dim + 16, dim + dim / 2)); }

}  // namespace

FockVector coherent_state(Complex alpha, const TruncationPolicy& policy) {
  policy.validate();
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
    throw std::invalid_argument("coherent_state: alpha must be finite");
  int d = policy.start_dim(std::abs(alpha));
  for (;;) {
    Eigen::VectorXcd a = coherent_amplitudes(alpha, d);
    const double tail = 1.0 - a.squaredNorm();  // exact norm of the full state is 1
    if (policy.mode == TruncationPolicy::Mode::Fixed || tail <= policy.target_tail_mass)
      return FockVector(std::move(a));
    if (d >= policy.max_dim)
      throw TruncationError("coherent_state: tail mass " + std::to_string(tail) +
                            " above target at max_dim " + std::to_string(policy.max_dim));
    d = grown(d, policy.max_dim);
  }
}

namespace {

// Associated Laguerre L_k^{(s)}(x) by the three-term recurrence in the degree.
double laguerre(int k, int s, double x) {
  if (k == 0) return 1.0;
  double lm1 = 1.0;
  double l = 1.0 + s - x;
  for (int i = 1; i < k; ++i) {
    const double lp1 = ((2.0 * i + 1.0 + s - x) * l - (i + s) * lm1) / (i + 1.0);
    lm1 = l;
    l = lp1;
  }
  return l;
}

}  // namespace

Complex displacement_element(Complex beta, int m, int n) {
  if (m < 0 || n < 0) throw std::invalid_argument("displacement_element: indices must be >= 0");
  const double x = std::norm(beta);
  const double gauss = std::exp(-0.5 * x);
  if (m >= n) {
    // sqrt(n!/m!) beta^{m-n} e^{-x/2} L_n^{(m-n)}(x)
    Complex pref = gauss;
    for (int i = n + 1; i <= m; ++i) pref *= beta / std::sqrt(double(i));
    return pref * laguerre(n, m - n, x);
  }
  Complex pref = gauss;
  for (int i = m + 1; i <= n; ++i) pref *= -std::conj(beta) / std::sqrt(double(i));
  return pref * laguerre(m, n - m, x);
}

Operator displacement_operator(Complex beta, int dim) {
  if (dim < 2) throw std::invalid_argument("displacement_operator: dim must be >= 2");
  const double x = std::norm(beta);
  const double gauss = std::exp(-0.5 * x);
  Operator d(dim, dim);
  // Fill diagonal by diagonal; one Laguerre recurrence per offset k, with the
  // prefactor advanced as p_n = p_{n-1} sqrt(n/(n+k)).
  for (int k = 0; k < dim; ++k) {
    Complex p = gauss;  // beta^k / sqrt(k!) * e^{-x/2}
    Complex q = gauss;  // (-conj(beta))^k / sqrt(k!) * e^{-x/2}
    for (int i = 1; i <= k; ++i) {
      p *= beta / std::sqrt(double(i));
      q *= -std::conj(beta) / std::sqrt(double(i));
    }
    double lm1 = 0.0, l = 1.0;  // L_{n-1}^{(k)}(x), L_n^{(k)}(x)
    for (int n = 0; n + k < dim; ++n) {
      if (n > 0) {
        const double c = n;
        const double lp1 = ((2.0 * (c - 1.0) + 1.0 + k - x) * l - (c - 1.0 + k) * lm1) / c;
        lm1 = l;
        l = lp1;
        const double scale = std::sqrt(c / (c + k));
        p *= scale;
        q *= scale;
      }
      d(n + k, n) = p * l;
      if (k > 0) d(n, n + k) = q * l;
    }
  }
  return d;
}

FockVector displaced_fock(double beta, int n, const TruncationPolicy& policy) {
  policy.validate();
  if (n < 0) throw std::invalid_argument("displaced_fock: n must be >= 0");
  int d = std::max(policy.start_dim(std::abs(beta), n), n + 1);
  for (;;) {
    Eigen::VectorXcd a(d);
    for (int m = 0; m < d; ++m) a[m] = displacement_element(beta, m, n);
    const double tail = 1.0 - a.squaredNorm();
    if (policy.mode == TruncationPolicy::Mode::Fixed || tail <= policy.target_tail_mass)
      return FockVector(std::move(a));
    if (d >= policy.max_dim)
      throw TruncationError("displaced_fock: tail mass " + std::to_string(tail) +
                            " above target at max_dim " + std::to_string(policy.max_dim));
    d = grown(d, policy.max_dim);
  }
}

Operator free_phases(double t, int dim) {
  if (dim < 1) throw std::invalid_argument("free_phases: dim must be >= 1");
  Operator u = Operator::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) u(n, n) = std::polar(1.0, -(n + 0.5) * t);
  return u;
}

Operator photon_present_evolution(double t, double beta, const TruncationPolicy& policy) {
  if (t < 0.0) throw std::invalid_argument("photon_present_evolution: t must be >= 0");
  policy.validate();
  int d = policy.dim;
  if (policy.mode == TruncationPolicy::Mode::Adaptive) {
    // Ensure the half-block states |n <= d/2> stay representable along their
    // full displaced orbit: (sqrt(d/2) + 2 beta)^2 + margin <= d.
    const double s = 2.0 * std::abs(beta) + std::sqrt(8.0 * beta * beta + 20.0);
    d = std::max(policy.start_dim(2.0 * std::abs(beta)),
                 static_cast<int>(std::ceil(2.0 * s * s)));
    d = std::min(std::max(d, 2), policy.max_dim);
  }
  // Form the product on a padded basis; cropping afterwards keeps the
  // returned block clean of truncated-product artifacts.
  const int big = (3 * d) / 2 + 16;
  const Operator disp = displacement_operator(beta, big);
  Eigen::VectorXcd phases(big);
  for (int n = 0; n < big; ++n) phases[n] = std::polar(1.0, -(n + 0.5 - beta * beta) * t);
  const Operator full = disp * phases.asDiagonal() * disp.adjoint();
  return full.topLeftCorner(d, d);
}

void apply_free_phases(double t, Eigen::VectorXcd& v) {
  for (Eigen::Index n = 0; n < v.size(); ++n) v[n] *= std::polar(1.0, -(double(n) + 0.5) * t);
}

Eigen::VectorXcd free_phase_factors(double t, int dim) {
  Eigen::VectorXcd p(dim);
  for (int n = 0; n < dim; ++n) p[n] = std::polar(1.0, -(n + 0.5) * t);
  return p;
}

}  // namespace optomech
