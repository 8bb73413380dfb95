#include "optomech/state_prep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace optomech {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kPenalty = 1e9;
constexpr double kOptimalBandwidth = 3.0 / (2.0 * M_PI);

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 0.5))
    throw std::invalid_argument("epsilon must lie in (0, 0.5)");
}

// sum_{j,k} c_j conj(c_k) / (1 + i (j-k)/gamma); the squared waveform
// normalization Z^2.
double modulation_norm_sq(const std::vector<Complex>& c, double gamma) {
  Complex acc = 0.0;
  const int m = static_cast<int>(c.size());
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) acc += c[j] * std::conj(c[k]) / (1.0 + kI * (double(j - k) / gamma));
  return acc.real();
}

}  // namespace

double displaced_vacuum_overlap(int n, double beta) {
  if (n < 0) throw std::invalid_argument("displaced_vacuum_overlap: n must be >= 0");
  double a = std::exp(-0.5 * beta * beta);
  for (int k = 1; k <= n; ++k) a *= -beta / std::sqrt(double(k));
  return a;
}

void TargetState::validate() const {
  if (coeffs.empty()) throw std::invalid_argument("TargetState: empty coefficient list");
  if (!std::isfinite(beta) || beta < 0.0)
    throw std::invalid_argument("TargetState: beta must be finite and >= 0");
  double n2 = 0.0;
  for (const Complex& c : coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw std::invalid_argument("TargetState: coefficients must be finite");
    n2 += std::norm(c);
  }
  if (std::abs(n2 - 1.0) > 1e-10)
    throw std::invalid_argument("TargetState: coefficients must have unit norm");
}

std::vector<Complex> TargetState::modulation_coeffs() const {
  validate();
  std::vector<Complex> ct(coeffs.size());
  for (size_t n = 0; n < coeffs.size(); ++n) {
    ct[n] = coeffs[n] / displaced_vacuum_overlap(static_cast<int>(n), beta);
    if (!std::isfinite(ct[n].real()) || !std::isfinite(ct[n].imag()))
      throw DivergentCoefficientsError(
          "TargetState: modulation coefficient overflowed at n = " + std::to_string(n));
  }
  return ct;
}

PhotonWaveform fock_prep_waveform(int n, double beta, double gamma) {
  return PhotonWaveform::fock_prep(n, beta, gamma);
}

ConditionalResult conditional_state(double t, const PhotonWaveform& wf, const SystemParams& p,
                                    const FockVector& phi0) {
  if (t < 0.0) throw std::invalid_argument("conditional_state: t must be >= 0");
  FockVector tail = detail::cavity_response(t, wf, p, phi0);
  ConditionalResult r;
  r.state = FockVector(0.5 * p.gamma * tail.amplitudes());
  r.squared_norm = r.state.squared_norm();
  return r;
}

FockVector circle_integral(int n, double beta, double upper_phi, const TruncationPolicy& policy) {
  if (n < 0) throw std::invalid_argument("circle_integral: n must be >= 0");
  if (upper_phi < 0.0 || upper_phi > 2.0 * M_PI + 1e-12)
    throw std::invalid_argument("circle_integral: upper_phi must lie in [0, 2 pi]");
  policy.validate();
  const int d = std::max(policy.start_dim(std::abs(beta), 8), n + 8);
  auto integrand = [&](double phi) -> Eigen::VectorXcd {
    const Complex alpha = -beta * std::exp(kI * phi);
    Eigen::VectorXcd a(d);
    a[0] = std::exp(-0.5 * std::norm(alpha));
    for (int m = 1; m < d; ++m) a[m] = a[m - 1] * alpha / std::sqrt(double(m));
    return std::exp(-kI * (double(n) * phi)) * a;
  };
  QuadratureConfig q;
  q.base_step = 2.0 * M_PI / 400.0;
  q.tolerance = 1e-10;
  return FockVector(detail::simpson_adaptive(integrand, 0.0, upper_phi, q));
}

namespace {

double window_from(double abs_overlap_sq, double abs_sum_inv, double epsilon) {
  // sqrt(8 pi^2 eps) / (|sum c~| sqrt(1 - |w|^2)); abs_sum_inv = 1/|sum c~|
  return std::sqrt(8.0 * M_PI * M_PI * epsilon) * abs_sum_inv / std::sqrt(1.0 - abs_overlap_sq);
}

}  // namespace

double fidelity_window_fock(int n, double beta, double epsilon) {
  check_epsilon(epsilon);
  const double a = displaced_vacuum_overlap(n, beta);
  if (std::abs(a) >= 1.0 - 1e-12)
    throw DegenerateTargetError("fidelity_window_fock: |<-beta|n>| ~ 1, window degenerates");
  return window_from(a * a, std::abs(a), epsilon);
}

SuccessProbability success_probability_fock(int n, double beta, double epsilon,
                                            double gamma_over_omega) {
  check_epsilon(epsilon);
  if (!(gamma_over_omega > 0.0))
    throw std::invalid_argument("success_probability_fock: gamma_over_omega must be > 0");
  const double a = std::abs(displaced_vacuum_overlap(n, beta));
  if (a >= 1.0 - 1e-12)
    throw DegenerateTargetError("success_probability_fock: |<-beta|n>| ~ 1");
  const double g = gamma_over_omega;
  const double p = 2.0 * std::sqrt(8.0 * epsilon) * std::pow(M_PI * g, 3) *
                   std::exp(-2.0 * M_PI * g) * a * a * a / std::sqrt(1.0 - a * a);
  return {p, p > 1.0};
}

std::pair<PhotonWaveform, double> arbitrary_prep_waveform(const TargetState& target, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("arbitrary_prep_waveform: gamma must be > 0");
  std::vector<Complex> ct = target.modulation_coeffs();
  PhotonWaveform wf = PhotonWaveform::modulated_prep(ct, target.beta, gamma);
  const double z_value = wf.get_if<PhotonWaveform::ModulatedPrep>()->z;

  // Numerical check of the unit L2 norm; catches normalization-sum bugs.
  double sum_abs = 0.0;
  for (const Complex& c : ct) sum_abs += std::abs(c);
  const double ratio = std::max(1.0, sum_abs * sum_abs / (z_value * z_value));
  const double extent = (50.0 + std::log(ratio)) / gamma;
  auto density = [&](double x) { return std::norm(wf.at(x)); };
  QuadratureConfig q;
  q.base_step = std::min(0.05, 0.5 / std::max<size_t>(1, ct.size() - 1));
  q.tolerance = 1e-10;
  const double mass = detail::simpson_adaptive_scalar(density, -extent, 0.0, q, 14);
  if (std::abs(mass - 1.0) > 1e-8)
    throw DivergentCoefficientsError("arbitrary_prep_waveform: envelope L2 mass " +
                                     std::to_string(mass) + " deviates from 1");
  return {std::move(wf), z_value};
}

PrepReport success_probability_state(const TargetState& target, double epsilon) {
  check_epsilon(epsilon);
  const std::vector<Complex> ct = target.modulation_coeffs();
  Complex sum_ct = std::accumulate(ct.begin(), ct.end(), Complex(0.0));
  if (std::abs(sum_ct) <= 1e-8)
    throw NongenericTargetError(
        "success_probability_state: sum of modulation coefficients vanishes");

  const double g = kOptimalBandwidth;
  const double z2 = modulation_norm_sq(ct, g);
  Complex w = 0.0;
  for (size_t n = 0; n < target.coeffs.size(); ++n)
    w += displaced_vacuum_overlap(static_cast<int>(n), target.beta) * target.coeffs[n];
  const double w2 = std::norm(w);
  if (w2 >= 1.0 - 1e-12)
    throw DegenerateTargetError("success_probability_state: target overlaps the coherent state");

  PrepReport r;
  r.window_delta_tau = window_from(w2, 1.0 / std::abs(sum_ct), epsilon);
  r.success_probability = 2.0 * std::sqrt(8.0 * epsilon) * std::pow(M_PI * g, 3) *
                          std::exp(-2.0 * M_PI * g) /
                          (z2 * std::abs(sum_ct) * std::sqrt(1.0 - w2));
  r.achieved_overlap = 1.0 - epsilon;
  r.normalization_z = std::sqrt(z2);
  return r;
}

namespace {

// Coefficients from the gauge-reduced coordinates: c_0 = x_0 (real),
// c_k = x_{2k-1} + i x_{2k}. Keeping c_0 real removes the global-phase
// valley that stalls the simplex.
std::vector<Complex> coeffs_from(const Eigen::VectorXd& x, int j) {
  std::vector<Complex> c(j + 1);
  c[0] = x[0];
  for (int k = 1; k <= j; ++k) c[k] = Complex(x[2 * k - 1], x[2 * k]);
  return c;
}

Eigen::VectorXd coords_from(std::vector<Complex> c, int j) {
  // Rotate the global phase so the first nonzero coefficient is real >= 0.
  for (const Complex& v : c) {
    if (std::abs(v) > 1e-14) {
      const Complex rot = std::conj(v) / std::abs(v);
      for (Complex& w : c) w *= rot;
      break;
    }
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * j + 1);
  x[0] = c[0].real();
  for (int k = 1; k <= j; ++k) {
    x[2 * k - 1] = c[k].real();
    x[2 * k] = c[k].imag();
  }
  return x;
}

struct SubspaceObjective {
  int j;
  double epsilon;
  std::vector<double> a;  // <-beta|n>

  double operator()(const Eigen::VectorXd& x) const {
    const double r2 = x.squaredNorm();
    if (r2 < 1e-20) return kPenalty;
    const double inv = 1.0 / std::sqrt(r2);
    Complex sum_ct = 0.0, w = 0.0;
    std::vector<Complex> ct(j + 1);
    ct[0] = x[0] * inv / a[0];
    for (int k = 1; k <= j; ++k) ct[k] = Complex(x[2 * k - 1], x[2 * k]) * inv / a[k];
    for (int k = 0; k <= j; ++k) {
      sum_ct += ct[k];
      w += ct[k] * a[k] * a[k];  // c_k a_k
    }
    const double abs_sum = std::abs(sum_ct);
    if (abs_sum <= 1e-8) return kPenalty;
    const double w2 = std::norm(w);
    if (w2 >= 1.0 - 1e-12) return kPenalty;
    const double g = kOptimalBandwidth;
    Complex z2acc = 0.0;
    for (int p = 0; p <= j; ++p)
      for (int q = 0; q <= j; ++q)
        z2acc += ct[p] * std::conj(ct[q]) / (1.0 + kI * (double(p - q) / g));
    const double z2 = z2acc.real();
    if (!(z2 > 0.0) || !std::isfinite(z2)) return kPenalty;
    return 2.0 * std::sqrt(8.0 * epsilon) * std::pow(M_PI * g, 3) * std::exp(-2.0 * M_PI * g) /
           (z2 * abs_sum * std::sqrt(1.0 - w2));
  }
};

// Standard Nelder-Mead on R^D; returns the best value seen and its point.
template <class F>
double nelder_mead(const F& f, Eigen::VectorXd x0, int max_evals, double rel_ftol,
                   Eigen::VectorXd& best_point) {
  const int d = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts(d + 1, x0);
  std::vector<double> val(d + 1);
  int evals = 0;
  for (int i = 1; i <= d; ++i) pts[i][i - 1] += 0.15;
  for (int i = 0; i <= d; ++i) val[i] = (++evals, f(pts[i]));

  std::vector<int> order(d + 1);
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return val[a] < val[b]; });
    const int lo = order[0], hi = order[d], second_hi = order[d - 1];
    const double spread = 2.0 * std::abs(val[hi] - val[lo]) /
                          (std::abs(val[hi]) + std::abs(val[lo]) + 1e-300);
    if (spread <= rel_ftol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int i = 0; i <= d; ++i)
      if (i != hi) centroid += pts[i];
    centroid /= double(d);

    Eigen::VectorXd xr = centroid + (centroid - pts[hi]);
    const double fr = (++evals, f(xr));
    if (fr < val[lo]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[hi]);
      const double fe = (++evals, f(xe));
      if (fe < fr) {
        pts[hi] = std::move(xe);
        val[hi] = fe;
      } else {
        pts[hi] = std::move(xr);
        val[hi] = fr;
      }
    } else if (fr < val[second_hi]) {
      pts[hi] = std::move(xr);
      val[hi] = fr;
    } else {
      Eigen::VectorXd xc = fr < val[hi] ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                        : Eigen::VectorXd(centroid - 0.5 * (centroid - pts[hi]));
      const double fc = (++evals, f(xc));
      if (fc < std::min(fr, val[hi])) {
        pts[hi] = std::move(xc);
        val[hi] = fc;
      } else {
        for (int i = 0; i <= d; ++i) {
          if (i == lo) continue;
          pts[i] = pts[lo] + 0.5 * (pts[i] - pts[lo]);
          val[i] = (++evals, f(pts[i]));
          if (evals >= max_evals) break;
        }
      }
    }
  }
  const auto it = std::min_element(val.begin(), val.end());
  best_point = pts[static_cast<size_t>(it - val.begin())];
  return *it;
}

}  // namespace

SubspaceMin min_success_over_subspace(int j, double beta, double epsilon,
                                      const OptimizerConfig& cfg) {
  if (j < 1) throw std::invalid_argument("min_success_over_subspace: j must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("min_success_over_subspace: beta must be > 0");
  check_epsilon(epsilon);
  if (cfg.random_starts < 0 || cfg.max_evals_per_start < 8)
    throw std::invalid_argument("min_success_over_subspace: bad optimizer configuration");

  SubspaceObjective obj;
  obj.j = j;
  obj.epsilon = epsilon;
  obj.a.resize(j + 1);
  for (int n = 0; n <= j; ++n) obj.a[n] = displaced_vacuum_overlap(n, beta);

  const int d = 2 * j + 1;
  std::vector<Eigen::VectorXd> starts;
  if (cfg.canonical_starts) {
    for (int k = 0; k <= j; ++k) {
      std::vector<Complex> c(j + 1, Complex(0.0));
      c[k] = 1.0;
      starts.push_back(coords_from(std::move(c), j));
    }
    for (double s : {1.0, -1.0}) {
      std::vector<Complex> c(j + 1, Complex(0.0));
      c[0] = 1.0 / std::sqrt(2.0);
      c[j] = s / std::sqrt(2.0);
      starts.push_back(coords_from(std::move(c), j));
    }
    std::vector<Complex> c(j + 1, Complex(0.0));
    c[0] = 1.0 / std::sqrt(2.0);
    c[j] = kI / std::sqrt(2.0);
    starts.push_back(coords_from(std::move(c), j));
  }
  for (const std::vector<Complex>& c : cfg.extra_starts) {
    if (static_cast<int>(c.size()) != j + 1)
      throw std::invalid_argument("min_success_over_subspace: extra start has wrong length");
    starts.push_back(coords_from(c, j));
  }
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int s = 0; s < cfg.random_starts; ++s) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x[i] = gauss(rng);
    starts.push_back(x.normalized());
  }

  SubspaceMin best;
  best.value = kPenalty;
  for (size_t s = 0; s < starts.size(); ++s) {
    Eigen::VectorXd arg;
    const double v = nelder_mead(obj, starts[s], cfg.max_evals_per_start, cfg.rel_ftol, arg);
    if (v < best.value) {
      best.value = v;
      best.start_index = static_cast<int>(s);
      std::vector<Complex> c = coeffs_from(arg, j);
      double n2 = 0.0;
      for (const Complex& z : c) n2 += std::norm(z);
      const double inv = 1.0 / std::sqrt(n2);
      for (Complex& z : c) z *= inv;
      // Re-apply the reporting gauge: first nonzero coefficient real >= 0.
      for (Complex& z : c) {
        if (std::abs(z) > 1e-14) {
          const Complex rot = std::conj(z) / std::abs(z);
          for (Complex& w : c) w *= rot;
          break;
        }
      }
      best.coeffs = std::move(c);
    }
  }
  if (!(best.value < 0.5 * kPenalty))
    throw OptimizerError("min_success_over_subspace: every start ended in the penalty region");
  return best;
}

}  // namespace optomech
