#pragma once

#include <complex>

#include <Eigen/Dense>

namespace optomech {

using Complex = std::complex<double>;

// Dense operator on the truncated number basis.
using Operator = Eigen::MatrixXcd;

/// Controls how many Fock levels a computation keeps.
///
/// Fixed mode pins the dimension; adaptive mode grows it until the truncated
/// tail mass drops below `target_tail_mass` or `max_dim` is reached.
struct TruncationPolicy {
  enum class Mode { Fixed, Adaptive };

  Mode mode = Mode::Adaptive;
  int dim = 0;                      // used in Fixed mode
  double target_tail_mass = 1e-12;  // used in Adaptive mode
  int max_dim = 512;

  static TruncationPolicy fixed(int dim);
  static TruncationPolicy adaptive(double target_tail_mass = 1e-12,
                                   int max_dim = 512);

  void validate() const;

  // Starting dimension for states confined within `radius` of the phase-space
  // origin, plus `extra` levels of headroom. All states reached by the
  // single-photon dynamics stay within radius 2*beta.
  int start_dim(double radius, int extra = 0) const;
};

/// Complex amplitudes over the truncated number basis |0>, |1>, ..., |dim-1>.
class FockVector {
 public:
  FockVector() = default;
  explicit FockVector(int dim) : a_(Eigen::VectorXcd::Zero(dim)) {}
  explicit FockVector(Eigen::VectorXcd amplitudes) : a_(std::move(amplitudes)) {}

  int dim() const { return static_cast<int>(a_.size()); }
  Complex operator[](int n) const { return a_[n]; }
  Complex& operator[](int n) { return a_[n]; }
  const Eigen::VectorXcd& amplitudes() const { return a_; }
  Eigen::VectorXcd& amplitudes() { return a_; }

  double squared_norm() const { return a_.squaredNorm(); }
  double norm() const { return a_.norm(); }

  // <this|other>; conjugates *this.
  Complex overlap(const FockVector& other) const;

  bool is_normalized(double tol = 1e-10) const;
  FockVector normalized() const;

  // Sum of |a_n|^2 for n >= from.
  double tail_mass(int from) const;

  // Zero-extends to `dim`. Shrinking is refused if it would drop more mass
  // than `max_loss`.
  FockVector resized(int dim, double max_loss = 1e-12) const;

  void require_finite() const;

 private:
  Eigen::VectorXcd a_;
};

FockVector basis_state(int n, int dim);

/// Coherent state |alpha>, amplitudes alpha^n e^{-|alpha|^2/2} / sqrt(n!).
FockVector coherent_state(Complex alpha, const TruncationPolicy& policy);

/// <m| exp(beta b^dag - conj(beta) b) |n> in closed form (associated
/// Laguerre); stable for moderate |beta|.
Complex displacement_element(Complex beta, int m, int n);

/// Dense truncation of the displacement operator D(beta).
Operator displacement_operator(Complex beta, int dim);

/// Displaced Fock state D(beta)|n>.
FockVector displaced_fock(double beta, int n, const TruncationPolicy& policy);

/// Free-oscillator evolution U_m(t): diagonal phases e^{-i(n+1/2)t}.
/// Times are in units of 1/omega_m throughout.
Operator free_phases(double t, int dim);

/// Oscillator evolution while the photon occupies the cavity:
/// D(beta) diag(e^{-i(n+1/2-beta^2)t}) D(beta)^dag.
Operator photon_present_evolution(double t, double beta,
                                  const TruncationPolicy& policy);

// Cheap in-place application of U_m(t) used by the dynamics engines.
void apply_free_phases(double t, Eigen::VectorXcd& v);
Eigen::VectorXcd free_phase_factors(double t, int dim);

}  // namespace optomech
