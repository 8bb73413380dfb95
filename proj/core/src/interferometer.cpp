#include "optomech/interferometer.hpp"

#include <algorithm>
#include <cmath>

namespace optomech {

namespace {

constexpr double kUnderflowFloor = 1e-300;

struct ArmScalars {
  double norm_a_sq;
  double norm_b_sq;
  Complex overlap_ab;
};

ArmScalars scalars_from(const ArmStates& arms) {
  return {arms.psi_a.squared_norm(), arms.psi_b.squared_norm(), arms.psi_a.overlap(arms.psi_b)};
}

double density(const ArmScalars& s, double phi) {
  const double p =
      0.25 * (s.norm_a_sq + s.norm_b_sq + 2.0 * std::real(std::polar(1.0, phi) * s.overlap_ab));
  return std::max(p, 0.0);
}

PExtrema extrema(const ArmScalars& s) {
  const double mean = s.norm_a_sq + s.norm_b_sq;
  const double swing = 2.0 * std::abs(s.overlap_ab);
  return {0.25 * (mean + swing), std::max(0.25 * (mean - swing), 0.0)};
}

double vis(const ArmScalars& s) {
  const double denom = s.norm_a_sq + s.norm_b_sq;
  if (denom < kUnderflowFloor)
    throw UndefinedVisibilityError("visibility: both arm norms vanished");
  return std::min(2.0 * std::abs(s.overlap_ab) / denom, 1.0);
}

bool tail_ok(const Eigen::VectorXcd& v) {
  const int d = static_cast<int>(v.size());
  const double total = v.squaredNorm();
  if (total == 0.0) return true;
  return v.tail(std::max(2, d / 8)).squaredNorm() <= 1e-9 * total;
}

}  // namespace

ArmStates arm_states(double t, const PhotonWaveform& wf, const SystemParams& p,
                     const FockVector& phi0) {
  p.validate();
  phi0.require_finite();
  if (t < 0.0) throw std::invalid_argument("arm_states: t must be >= 0");

  int d = detail::working_dim(p, phi0);
  if (t == 0.0) {
    // Only the prompt spike exists; both arms coincide exactly.
    ArmStates arms;
    arms.psi_a = detail::prompt_term(0.0, wf, p, phi0);
    arms.psi_b = arms.psi_a;
    return arms;
  }
  for (;;) {
    const Eigen::VectorXcd x0 = phi0.resized(d, 1e-10).amplitudes();
    const bool coupled = p.beta != 0.0;
    Operator disp_minus, disp_plus;
    if (coupled) {
      disp_minus = displacement_operator(-p.beta, d);
      disp_plus = displacement_operator(p.beta, d);
    }
    const double b2 = p.beta * p.beta;

    // Stacked integrand: the rotated arm-A tail in the first d slots and the
    // scalar arm-B tail in the last slot, so both arms share every node.
    auto integrand = [&](double tp) -> Eigen::VectorXcd {
      Eigen::VectorXcd out(d + 1);
      Eigen::VectorXcd z = x0;
      apply_free_phases(tp, z);
      Eigen::VectorXcd y = coupled ? Eigen::VectorXcd(disp_minus * z) : std::move(z);
      const double s = t - tp;
      const Complex decay = wf.at(-tp) * std::exp(Complex(-0.5 * p.gamma * s, 0.0));
      apply_free_phases(s, y);
      out.head(d) = (decay * std::exp(Complex(0.0, b2 * s))) * y;
      out[d] = decay;
      return out;
    };

    const Eigen::VectorXcd tail = detail::simpson_adaptive(integrand, 0.0, t, p.quad);

    Eigen::VectorXcd evolved = x0;
    apply_free_phases(t, evolved);
    const Complex prompt = wf.at(-t);

    Eigen::VectorXcd y_t = coupled ? Eigen::VectorXcd(disp_minus * evolved) : evolved;
    Eigen::VectorXcd u = prompt * y_t - p.gamma * tail.head(d);
    Eigen::VectorXcd a = coupled ? Eigen::VectorXcd(disp_plus * u) : std::move(u);
    Eigen::VectorXcd b = (prompt - p.gamma * tail[d]) * evolved;

    if (p.policy.mode == TruncationPolicy::Mode::Fixed || tail_ok(a)) {
      ArmStates arms;
      arms.psi_a = FockVector(std::move(a));
      arms.psi_b = FockVector(std::move(b));
      return arms;
    }
    if (d >= p.policy.max_dim)
      throw TruncationError("arm_states: state does not fit below max_dim");
    d = std::min(p.policy.max_dim, std::max(d + 16, d + d / 2));
  }
}

double probability_density(double t, double phi, const PhotonWaveform& wf, const SystemParams& p,
                           const FockVector& phi0) {
  return density(scalars_from(arm_states(t, wf, p, phi0)), phi);
}

PExtrema p_extrema(double t, const PhotonWaveform& wf, const SystemParams& p,
                   const FockVector& phi0) {
  return extrema(scalars_from(arm_states(t, wf, p, phi0)));
}

double visibility(double t, const PhotonWaveform& wf, const SystemParams& p,
                  const FockVector& phi0) {
  return vis(scalars_from(arm_states(t, wf, p, phi0)));
}

std::vector<double> default_tau_grid() {
  const double step = M_PI / 200.0;
  std::vector<double> grid;
  grid.reserve(801);
  for (int i = 0; i <= 800; ++i) grid.push_back(i * step);
  return grid;
}

namespace {

bool uniform_from_zero(const std::vector<double>& grid, double& step) {
  if (grid.size() < 3) return false;
  if (std::abs(grid.front()) > 1e-12) return false;
  step = grid[1] - grid[0];
  if (!(step > 0.0)) return false;
  for (size_t i = 1; i < grid.size(); ++i)
    if (std::abs(grid[i] - double(i) * step) > 1e-9 * std::max(1.0, grid.back())) return false;
  return true;
}

SweepTable series_header() {
  SweepTable t;
  t.header = {"tau", "p_max", "p_min", "v"};
  return t;
}

void push_row(SweepTable& table, double tau, const ArmScalars& s) {
  SweepTable::Row row;
  const double denom = s.norm_a_sq + s.norm_b_sq;
  if (denom < kUnderflowFloor) {
    row.values = {tau, std::nan(""), std::nan(""), std::nan("")};
    row.error = "undefined visibility: both arm norms vanished";
  } else {
    const PExtrema pe = extrema(s);
    row.values = {tau, pe.p_max, pe.p_min, vis(s)};
  }
  table.rows.push_back(std::move(row));
}

}  // namespace

SweepTable visibility_series(const PhotonWaveform& wf, const SystemParams& p,
                             const FockVector& phi0, const std::vector<double>& tau_grid) {
  p.validate();
  if (tau_grid.empty()) throw std::invalid_argument("visibility_series: empty tau grid");

  SweepTable table = series_header();
  double step = 0.0;
  if (uniform_from_zero(tau_grid, step) && p.gamma * tau_grid.back() <= 600.0) {
    // Single cumulative pass over the boundary line; every tau is a node.
    const int npts = static_cast<int>(tau_grid.size());
    int per = std::max(1, static_cast<int>(std::ceil(step / p.quad.base_step)));
    if (((npts - 1) * per) % 2 != 0) per *= 2;

    std::vector<ArmScalars> prev;
    for (int level = 0; level < 8; ++level) {
      const int n = (npts - 1) * per;
      const detail::BoundaryLine line =
          detail::boundary_line(tau_grid.back(), n, wf, p, phi0);
      std::vector<ArmScalars> cur(npts);
      for (int i = 0; i < npts; ++i) {
        const int j = i * per;
        cur[i] = {line.norm_a_sq[j], std::norm(line.beta0_scalar[j]), line.overlap_ab[j]};
      }
      bool converged = !prev.empty();
      if (converged) {
        for (int i = 0; i < npts; ++i) {
          const double diff = std::max(
              {std::abs(cur[i].norm_a_sq - prev[i].norm_a_sq),
               std::abs(cur[i].norm_b_sq - prev[i].norm_b_sq),
               std::abs(cur[i].overlap_ab - prev[i].overlap_ab)});
          if (diff > p.quad.tolerance) {
            converged = false;
            break;
          }
        }
      }
      if (converged) {
        for (int i = 0; i < npts; ++i) push_row(table, tau_grid[i], cur[i]);
        return table;
      }
      prev = std::move(cur);
      per *= 2;
    }
    throw QuadratureError("visibility_series: refinement did not converge");
  }

  for (double tau : tau_grid) push_row(table, tau, scalars_from(arm_states(tau, wf, p, phi0)));
  return table;
}

}  // namespace optomech
