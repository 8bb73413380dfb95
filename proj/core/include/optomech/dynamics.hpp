#pragma once

#include <vector>

#include "optomech/fock.hpp"
#include "optomech/quadrature.hpp"
#include "optomech/waveform.hpp"

namespace optomech {

/// Dimensionless description of the driven cavity. All rates are in units of
/// the mechanical frequency omega_m, all times in 1/omega_m.
struct SystemParams {
  double beta = 0.0;       // optomechanical coupling
  double gamma = 1.0;      // cavity bandwidth
  double big_gamma = 1.0;  // photon frequency width
  double phi = 0.0;        // interferometer detuning phase
  TruncationPolicy policy{};
  QuadratureConfig quad{};

  static SystemParams make(double beta, double gamma, double big_gamma, double phi = 0.0);
  void validate() const;
};

/// The cavity's optical Green function splits into an instantaneous prompt
/// reflection (weight 1, never discretized) and a smooth decaying tail
/// gamma e^{-gamma dt / 2}, which is what the quadrature sees.
struct GreenFunctionSplit {
  double prompt_weight;
  double tail;
};

GreenFunctionSplit green_prompt_and_tail(double dt, double gamma);

/// Unnormalized mirror state entangled with a photon found at (x, t), for
/// x >= 0 and t > x. Its squared norm is the photon probability density.
FockVector out_state(double t, double x, const PhotonWaveform& wf, const SystemParams& p,
                     const FockVector& phi0);

/// Unnormalized mirror state entangled with the in-cavity photon at time t.
FockVector in_cavity_state(double t, const PhotonWaveform& wf, const SystemParams& p,
                           const FockVector& phi0);

/// Total probability at time t: ingoing + outgoing + in-cavity. Equals 1 up
/// to quadrature error; deviations flag an implementation or truncation bug.
double probability_audit(double t, const PhotonWaveform& wf, const SystemParams& p,
                         const FockVector& phi0);

/// Full joint state on the outgoing grid at one instant.
struct JointStateSnapshot {
  double t = 0.0;
  std::vector<double> x_grid;    // ascending over [0, t]
  std::vector<FockVector> psi1;  // unnormalized outgoing components
  FockVector psi2;               // unnormalized in-cavity component
  double ingoing_mass = 0.0;
  double total_probability = 0.0;
};

JointStateSnapshot joint_snapshot(double t, const PhotonWaveform& wf, const SystemParams& p,
                                  const FockVector& phi0);

namespace detail {

// Working truncation for the dynamics of a given initial state.
int working_dim(const SystemParams& p, const FockVector& phi0);

// Prompt reflection piece F(x - t) U_m(t) |phi0>, evaluated at the boundary
// (x = 0+, time v): F(-v) U_m(v) |phi0>.
FockVector prompt_term(double v, const PhotonWaveform& wf, const SystemParams& p,
                       const FockVector& phi0);

// Cavity tail integral
//   ∫_0^v e^{-gamma (v-t')/2} F(-t') U_gamma(v-t') U_m(t') |phi0> dt'
// evaluated by adaptive composite Simpson.
FockVector cavity_response(double v, const PhotonWaveform& wf, const SystemParams& p,
                           const FockVector& phi0);

// Boundary state |psi_1(0+, v)> = prompt - gamma * cavity_response. The
// junction condition fixes the relative minus sign between the prompt
// reflection and the cavity-leaked wave; it is what conserves probability.
FockVector out_boundary(double v, const PhotonWaveform& wf, const SystemParams& p,
                        const FockVector& phi0);

// One cumulative pass along the boundary line v_j = j h, j = 0..n. States are
// returned in the frame rotated by D(-beta), which leaves norms and the
// overlaps against the beta -> 0 image unchanged.
struct BoundaryLine {
  double h = 0.0;
  int dim = 0;
  std::vector<double> norm_a_sq;      // ||psi_1(0+, v_j)||^2
  std::vector<Complex> beta0_scalar;  // beta -> 0 image: psi_1 = s_j U_m(v_j) phi0
  std::vector<Complex> overlap_ab;    // <psi_1(v_j) | beta -> 0 image(v_j)>
  Eigen::VectorXcd psi2_rotated;      // psi_2(t) = sqrt(gamma) D(beta) * this
  std::vector<Eigen::VectorXcd> states;  // rotated boundary states (optional)
};

BoundaryLine boundary_line(double t, int n_intervals, const PhotonWaveform& wf,
                           const SystemParams& p, const FockVector& phi0,
                           bool keep_states = false);

}  // namespace detail
}  // namespace optomech
