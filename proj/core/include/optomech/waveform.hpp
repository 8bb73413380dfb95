#pragma once

#include <variant>
#include <vector>

#include "optomech/fock.hpp"

namespace optomech {

/// Ingoing single-photon envelope F(x), supported on x <= 0 and normalized to
/// unit L2 mass. x is in units of c/omega_m, rates in units of omega_m.
class PhotonWaveform {
 public:
  /// F(x) = sqrt(2 Gamma) e^{Gamma x} Theta(-x)
  struct ExponentialDecay {
    double big_gamma;
  };

  /// F(x) = sqrt(gamma) e^{(gamma/2 - i beta^2 + i n) x} Theta(-x); conditioning
  /// on arrival at tau = 2 pi prepares the displaced Fock state D(beta)|n>.
  struct FockPrep {
    int n;
    double beta;
    double gamma;
  };

  /// Periodically modulated preparation envelope
  /// F(x) = sqrt(gamma) e^{(gamma/2 - i beta^2) x} / Z * sum_n c~_n e^{i n x}.
  struct ModulatedPrep {
    std::vector<Complex> coeffs;  // c~_n
    double beta;
    double gamma;
    double z;  // normalization Z
  };

  /// Piecewise-linear samples (x ascending, all x <= 0).
  struct Sampled {
    std::vector<double> x;
    std::vector<Complex> f;
  };

  static PhotonWaveform exponential(double big_gamma);
  static PhotonWaveform fock_prep(int n, double beta, double gamma);
  // Takes the raw modulation coefficients; computes Z and checks convergence.
  static PhotonWaveform modulated_prep(std::vector<Complex> coeffs, double beta, double gamma);
  static PhotonWaveform sampled(std::vector<double> x, std::vector<Complex> f);

  Complex at(double x) const;

  // Mass still propagating toward the cavity at time t: integral of |F|^2
  // over x < -t.
  double ingoing_mass_beyond(double t) const;

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

 private:
  using Variant = std::variant<ExponentialDecay, FockPrep, ModulatedPrep, Sampled>;
  explicit PhotonWaveform(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

}  // namespace optomech
