#include "optomech/waveform.hpp"

#include <cmath>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr Complex kI{0.0, 1.0};

double modulation_norm_sq(const std::vector<Complex>& c, double gamma) {
  // sum_{j,k} c_j conj(c_k) / (1 + i (j - k)/gamma); real by symmetry
  Complex acc = 0.0;
  const int m = static_cast<int>(c.size());
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) acc += c[j] * std::conj(c[k]) / (1.0 + kI * (double(j - k) / gamma));
  return acc.real();
}

}  // namespace

PhotonWaveform PhotonWaveform::exponential(double big_gamma) {
  if (!(big_gamma > 0.0) || !std::isfinite(big_gamma))
    throw std::invalid_argument("PhotonWaveform: big_gamma must be positive and finite");
  return PhotonWaveform(ExponentialDecay{big_gamma});
}

PhotonWaveform PhotonWaveform::fock_prep(int n, double beta, double gamma) {
  if (n < 0) throw std::invalid_argument("PhotonWaveform: n must be >= 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("PhotonWaveform: gamma must be > 0");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("PhotonWaveform: beta must be >= 0 and finite");
  return PhotonWaveform(FockPrep{n, beta, gamma});
}

PhotonWaveform PhotonWaveform::modulated_prep(std::vector<Complex> coeffs, double beta,
                                              double gamma) {
  if (coeffs.empty()) throw std::invalid_argument("PhotonWaveform: empty modulation coefficients");
  if (!(gamma > 0.0)) throw std::invalid_argument("PhotonWaveform: gamma must be > 0");
  for (const Complex& c : coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw DivergentCoefficientsError("PhotonWaveform: modulation coefficient overflowed");
  const double z2 = modulation_norm_sq(coeffs, gamma);
  if (!(z2 > 0.0) || !std::isfinite(z2))
    throw DivergentCoefficientsError("PhotonWaveform: modulation normalization sum is not positive-finite");
  return PhotonWaveform(ModulatedPrep{std::move(coeffs), beta, gamma, std::sqrt(z2)});
}

PhotonWaveform PhotonWaveform::sampled(std::vector<double> x, std::vector<Complex> f) {
  if (x.size() != f.size() || x.size() < 2)
    throw std::invalid_argument("PhotonWaveform: sampled grid needs >= 2 matching points");
  for (size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(f[i].real()) || !std::isfinite(f[i].imag()))
      throw std::invalid_argument("PhotonWaveform: sampled values must be finite");
    if (x[i] > 0.0) throw std::invalid_argument("PhotonWaveform: samples must satisfy x <= 0");
    if (i > 0 && !(x[i] > x[i - 1]))
      throw std::invalid_argument("PhotonWaveform: sample grid must be strictly ascending");
  }
  double mass = 0.0;
  for (size_t i = 1; i < x.size(); ++i)
    mass += 0.5 * (x[i] - x[i - 1]) * (std::norm(f[i]) + std::norm(f[i - 1]));
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::invalid_argument("PhotonWaveform: sampled envelope has L2 mass " +
                                std::to_string(mass) + ", expected 1");
  return PhotonWaveform(Sampled{std::move(x), std::move(f)});
}

Complex PhotonWaveform::at(double x) const {
  if (x > 0.0) return 0.0;
  if (const auto* e = std::get_if<ExponentialDecay>(&v_))
    return std::sqrt(2.0 * e->big_gamma) * std::exp(e->big_gamma * x);
  if (const auto* p = std::get_if<FockPrep>(&v_))
    return std::sqrt(p->gamma) *
           std::exp((0.5 * p->gamma + kI * (double(p->n) - p->beta * p->beta)) * x);
  if (const auto* m = std::get_if<ModulatedPrep>(&v_)) {
    Complex mod = 0.0;
    for (size_t n = 0; n < m->coeffs.size(); ++n) mod += m->coeffs[n] * std::exp(kI * (double(n) * x));
    return std::sqrt(m->gamma) * std::exp((0.5 * m->gamma - kI * (m->beta * m->beta)) * x) * mod /
           m->z;
  }
  const auto& s = std::get<Sampled>(v_);
  if (x < s.x.front() || x > s.x.back()) return 0.0;
  const auto it = std::lower_bound(s.x.begin(), s.x.end(), x);
  const size_t hi = std::min<size_t>(std::max<ptrdiff_t>(it - s.x.begin(), 1), s.x.size() - 1);
  const double w = (x - s.x[hi - 1]) / (s.x[hi] - s.x[hi - 1]);
  return s.f[hi - 1] * (1.0 - w) + s.f[hi] * w;
}

double PhotonWaveform::ingoing_mass_beyond(double t) const {
  if (t < 0.0) throw std::invalid_argument("ingoing_mass_beyond: t must be >= 0");
  if (const auto* e = std::get_if<ExponentialDecay>(&v_)) return std::exp(-2.0 * e->big_gamma * t);
  if (const auto* p = std::get_if<FockPrep>(&v_)) return std::exp(-p->gamma * t);
  if (const auto* m = std::get_if<ModulatedPrep>(&v_)) {
    Complex acc = 0.0;
    const int k = static_cast<int>(m->coeffs.size());
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        acc += m->coeffs[i] * std::conj(m->coeffs[j]) *
               std::exp(-(m->gamma + kI * double(i - j)) * t) /
               (1.0 + kI * (double(i - j) / m->gamma));
    return acc.real() / (m->z * m->z);
  }
  const auto& s = std::get<Sampled>(v_);
  const double cut = -t;
  double mass = 0.0;
  for (size_t i = 1; i < s.x.size() && s.x[i - 1] < cut; ++i) {
    const double xl = s.x[i - 1];
    const double xr = std::min(s.x[i], cut);
    const double w = (xr - s.x[i - 1]) / (s.x[i] - s.x[i - 1]);
    const Complex fr = s.f[i - 1] * (1.0 - w) + s.f[i] * w;
    mass += 0.5 * (xr - xl) * (std::norm(s.f[i - 1]) + std::norm(fr));
  }
  return mass;
}

}  // namespace optomech
