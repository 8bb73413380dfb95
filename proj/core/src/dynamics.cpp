#include "optomech/dynamics.hpp"

#include <cmath>

namespace optomech {

namespace {
constexpr Complex kI{0.0, 1.0};
}

SystemParams SystemParams::make(double beta, double gamma, double big_gamma, double phi) {
  SystemParams p;
  p.beta = beta;
  p.gamma = gamma;
  p.big_gamma = big_gamma;
  p.phi = phi;
  p.quad = QuadratureConfig::for_rate(gamma);
  p.validate();
  return p;
}

void SystemParams::validate() const {
  if (!std::isfinite(beta) || beta < 0.0)
    throw std::invalid_argument("SystemParams: beta must be finite and >= 0");
  if (!std::isfinite(gamma) || !(gamma > 0.0))
    throw std::invalid_argument("SystemParams: gamma must be finite and > 0");
  if (!std::isfinite(big_gamma) || big_gamma < 0.0)
    throw std::invalid_argument("SystemParams: big_gamma must be finite and >= 0");
  if (!std::isfinite(phi)) throw std::invalid_argument("SystemParams: phi must be finite");
  policy.validate();
  quad.validate_for_rate(gamma);
}

GreenFunctionSplit green_prompt_and_tail(double dt, double gamma) {
  if (dt < 0.0) throw std::invalid_argument("green_prompt_and_tail: dt must be >= 0");
  return {1.0, gamma * std::exp(-0.5 * gamma * dt)};
}

namespace detail {

int working_dim(const SystemParams& p, const FockVector& phi0) {
  if (p.policy.mode == TruncationPolicy::Mode::Fixed) return p.policy.dim;
  return std::min(p.policy.max_dim, p.policy.start_dim(2.0 * p.beta, phi0.dim()));
}

namespace {

// Relative mass in the top eighth of the truncation; used to decide whether
// an adaptively sized result needs a larger basis.
bool tail_acceptable(const Eigen::VectorXcd& v) {
  const int d = static_cast<int>(v.size());
  const int slice = std::max(2, d / 8);
  const double total = v.squaredNorm();
  if (total == 0.0) return true;
  return v.tail(slice).squaredNorm() <= 1e-9 * total;
}

int grow(int dim, int max_dim) { return std::min(max_dim, std::max(dim + 16, dim + dim / 2)); }

Eigen::VectorXcd embedded(const FockVector& phi0, int dim) {
  return phi0.resized(dim, 1e-10).amplitudes();
}

}  // namespace

FockVector prompt_term(double v, const PhotonWaveform& wf, const SystemParams& p,
                       const FockVector& phi0) {
  const int d = working_dim(p, phi0);
  Eigen::VectorXcd out = embedded(phi0, d);
  apply_free_phases(v, out);
  return FockVector(wf.at(-v) * out);
}

FockVector cavity_response(double v, const PhotonWaveform& wf, const SystemParams& p,
                           const FockVector& phi0) {
  p.validate();
  phi0.require_finite();
  if (v < 0.0) throw std::invalid_argument("cavity_response: time must be >= 0");
  int d = working_dim(p, phi0);
  for (;;) {
    const Eigen::VectorXcd x0 = embedded(phi0, d);
    const bool coupled = p.beta != 0.0;
    Operator disp_minus, disp_plus;
    if (coupled) {
      disp_minus = displacement_operator(-p.beta, d);
      disp_plus = displacement_operator(p.beta, d);
    }
    const double b2 = p.beta * p.beta;
    auto integrand = [&](double tp) -> Eigen::VectorXcd {
      Eigen::VectorXcd z = x0;
      apply_free_phases(tp, z);
      Eigen::VectorXcd y = coupled ? Eigen::VectorXcd(disp_minus * z) : std::move(z);
      const double s = v - tp;
      const Complex scale = wf.at(-tp) * std::exp(Complex(-0.5 * p.gamma * s, b2 * s));
      apply_free_phases(s, y);
      return scale * y;
    };
    Eigen::VectorXcd tail = detail::simpson_adaptive(integrand, 0.0, v, p.quad);
    if (coupled) tail = disp_plus * tail;
    if (p.policy.mode == TruncationPolicy::Mode::Fixed || tail_acceptable(tail))
      return FockVector(std::move(tail));
    if (d >= p.policy.max_dim)
      throw TruncationError("cavity_response: state does not fit below max_dim");
    d = grow(d, p.policy.max_dim);
  }
}

FockVector out_boundary(double v, const PhotonWaveform& wf, const SystemParams& p,
                        const FockVector& phi0) {
  FockVector tail = cavity_response(v, wf, p, phi0);
  FockVector prompt = prompt_term(v, wf, p, phi0).resized(tail.dim());
  return FockVector(prompt.amplitudes() - p.gamma * tail.amplitudes());
}

BoundaryLine boundary_line(double t, int n, const PhotonWaveform& wf, const SystemParams& p,
                           const FockVector& phi0, bool keep_states) {
  p.validate();
  if (t < 0.0) throw std::invalid_argument("boundary_line: t must be >= 0");
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("boundary_line: need an even interval count");
  if (p.gamma * t > 600.0)
    throw QuadratureError("boundary_line: gamma * t too large for the cumulative pass");

  const int d = working_dim(p, phi0);
  const Eigen::VectorXcd x0 = embedded(phi0, d);
  const bool coupled = p.beta != 0.0;
  Operator disp_minus;
  if (coupled) disp_minus = displacement_operator(-p.beta, d);
  const double b2 = p.beta * p.beta;
  const double h = t / n;

  BoundaryLine line;
  line.h = h;
  line.dim = d;
  line.norm_a_sq.resize(n + 1);
  line.beta0_scalar.resize(n + 1);
  line.overlap_ab.resize(n + 1);
  if (keep_states) line.states.resize(n + 1);

  // q_j = F(-v_j) e^{(gamma/2 - i beta^2) v_j} U_m(-v_j) y_j with
  // y_j = D(-beta) U_m(v_j) phi0; prefix integrals K_j then give the cavity
  // tail as Phi(v_j) K_j with Phi(s) = e^{-(gamma/2 - i beta^2)s} U_m(s).
  std::vector<Eigen::VectorXcd> y(n + 1), q(n + 1);
  std::vector<Complex> fsc(n + 1), q0(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double v = j * h;
    Eigen::VectorXcd z = x0;
    apply_free_phases(v, z);
    y[j] = coupled ? Eigen::VectorXcd(disp_minus * z) : std::move(z);
    fsc[j] = wf.at(-v);
    const Complex up = std::exp(Complex(0.5 * p.gamma * v, -b2 * v));
    q[j] = fsc[j] * up * y[j];
    apply_free_phases(-v, q[j]);
    q0[j] = fsc[j] * std::exp(0.5 * p.gamma * v);
  }

  // Cumulative Simpson: exact composite values at even nodes, quadratic
  // half-panel rule at odd nodes.
  std::vector<Eigen::VectorXcd> K(n + 1);
  std::vector<Complex> K0(n + 1);
  K[0] = Eigen::VectorXcd::Zero(d);
  K0[0] = 0.0;
  for (int j = 2; j <= n; j += 2) {
    K[j] = K[j - 2] + (h / 3.0) * (q[j - 2] + 4.0 * q[j - 1] + q[j]);
    K0[j] = K0[j - 2] + (h / 3.0) * (q0[j - 2] + 4.0 * q0[j - 1] + q0[j]);
  }
  for (int j = 1; j <= n; j += 2) {
    const int r = (j + 1 <= n) ? j + 1 : j - 1;
    K[j] = K[j - 1] + (h / 12.0) * (5.0 * q[j - 1] + 8.0 * q[j] - q[r]);
    K0[j] = K0[j - 1] + (h / 12.0) * (5.0 * q0[j - 1] + 8.0 * q0[j] - q0[r]);
  }

  for (int j = 0; j <= n; ++j) {
    const double v = j * h;
    const Complex down = std::exp(Complex(-0.5 * p.gamma * v, b2 * v));
    Eigen::VectorXcd tail = down * K[j];
    apply_free_phases(v, tail);
    Eigen::VectorXcd u = fsc[j] * y[j] - p.gamma * tail;
    line.norm_a_sq[j] = u.squaredNorm();
    line.beta0_scalar[j] = fsc[j] - p.gamma * std::exp(-0.5 * p.gamma * v) * K0[j];
    line.overlap_ab[j] = u.dot(y[j]) * line.beta0_scalar[j];
    if (j == n) {
      line.psi2_rotated = down * K[n];
      apply_free_phases(t, line.psi2_rotated);
    }
    if (j == n || j == n / 2) {
      // The start dimension is clamped at max_dim; refuse silently truncated
      // dynamics in adaptive mode.
      const double total = u.squaredNorm();
      if (p.policy.mode == TruncationPolicy::Mode::Adaptive && total > 0.0 &&
          u.tail(std::max(2, d / 8)).squaredNorm() > 1e-8 * total)
        throw TruncationError("boundary_line: state does not fit below max_dim " +
                              std::to_string(p.policy.max_dim));
    }
    if (keep_states) line.states[j] = std::move(u);
  }
  return line;
}

}  // namespace detail

FockVector out_state(double t, double x, const PhotonWaveform& wf, const SystemParams& p,
                     const FockVector& phi0) {
  if (x < 0.0) throw std::domain_error("out_state: x must be >= 0");
  if (!(t > x)) throw std::domain_error("out_state: need t > x (outgoing light cone)");
  FockVector bnd = detail::out_boundary(t - x, wf, p, phi0);
  apply_free_phases(x, bnd.amplitudes());
  return bnd;
}

FockVector in_cavity_state(double t, const PhotonWaveform& wf, const SystemParams& p,
                           const FockVector& phi0) {
  if (t < 0.0) throw std::invalid_argument("in_cavity_state: t must be >= 0");
  FockVector tail = detail::cavity_response(t, wf, p, phi0);
  return FockVector(std::sqrt(p.gamma) * tail.amplitudes());
}

namespace {

struct AuditResult {
  double ingoing;
  double outgoing;
  double cavity;
  double total() const { return ingoing + outgoing + cavity; }
};

AuditResult audit_at_step(double t, int n, const PhotonWaveform& wf, const SystemParams& p,
                          const FockVector& phi0) {
  const detail::BoundaryLine line = detail::boundary_line(t, n, wf, p, phi0);
  // Outgoing mass: ∫_0^t ||psi_1(0+, v)||^2 dv by composite Simpson over the
  // same grid, ascending v.
  double acc = line.norm_a_sq[0] + line.norm_a_sq[n];
  for (int j = 1; j < n; j += 2) acc += 4.0 * line.norm_a_sq[j];
  for (int j = 2; j < n; j += 2) acc += 2.0 * line.norm_a_sq[j];
  const double outgoing = acc * line.h / 3.0;
  const double cavity = p.gamma * line.psi2_rotated.squaredNorm();
  return {wf.ingoing_mass_beyond(t), outgoing, cavity};
}

}  // namespace

double probability_audit(double t, const PhotonWaveform& wf, const SystemParams& p,
                         const FockVector& phi0) {
  if (t < 0.0) throw std::invalid_argument("probability_audit: t must be >= 0");
  if (t == 0.0) return wf.ingoing_mass_beyond(0.0);
  int n = detail::even_intervals(t, p.quad.base_step);
  double prev = audit_at_step(t, n, wf, p, phi0).total();
  const double r4 = std::pow(double(p.quad.refine_factor), 4);
  for (int level = 0; level < 8; ++level) {
    n *= p.quad.refine_factor;
    const double cur = audit_at_step(t, n, wf, p, phi0).total();
    if (std::abs(cur - prev) <= p.quad.tolerance) return cur + (cur - prev) / (r4 - 1.0);
    prev = cur;
  }
  throw QuadratureError("probability_audit: refinement did not converge");
}

JointStateSnapshot joint_snapshot(double t, const PhotonWaveform& wf, const SystemParams& p,
                                  const FockVector& phi0) {
  if (!(t > 0.0)) throw std::invalid_argument("joint_snapshot: t must be > 0");
  const int n = detail::even_intervals(t, p.quad.base_step);
  const detail::BoundaryLine line = detail::boundary_line(t, n, wf, p, phi0, true);

  JointStateSnapshot snap;
  snap.t = t;
  snap.ingoing_mass = wf.ingoing_mass_beyond(t);

  const bool coupled = p.beta != 0.0;
  Operator disp_plus;
  if (coupled) disp_plus = displacement_operator(p.beta, line.dim);

  snap.x_grid.resize(n + 1);
  snap.psi1.resize(n + 1);
  double acc = 0.0;
  for (int j = 0; j <= n; ++j) {
    // x ascending corresponds to the boundary time v = t - x descending.
    const int jb = n - j;
    snap.x_grid[j] = j * line.h;
    Eigen::VectorXcd s = coupled ? Eigen::VectorXcd(disp_plus * line.states[jb])
                                 : line.states[jb];
    apply_free_phases(snap.x_grid[j], s);
    snap.psi1[j] = FockVector(std::move(s));
    const double w = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    acc += w * line.norm_a_sq[jb];
  }
  Eigen::VectorXcd psi2 =
      coupled ? Eigen::VectorXcd(disp_plus * line.psi2_rotated) : line.psi2_rotated;
  snap.psi2 = FockVector(std::sqrt(p.gamma) * psi2);
  snap.total_probability =
      snap.ingoing_mass + acc * line.h / 3.0 + snap.psi2.squared_norm();
  return snap;
}

}  // namespace optomech
