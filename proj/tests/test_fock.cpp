#include <cmath>
#include <random>

#include <doctest.h>

#include "optomech/errors.hpp"
#include "optomech/fock.hpp"
#include "oracles.hpp"

using namespace optomech;

namespace {

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

double low_block_unitarity_defect(const Operator& u) {
  const int half = static_cast<int>(u.rows()) / 2;
  const Eigen::MatrixXcd g = u.adjoint() * u;
  return max_abs_diff(g.topLeftCorner(half, half), Eigen::MatrixXcd::Identity(half, half));
}

}  // namespace

TEST_CASE("coherent state basics") {
  const TruncationPolicy pol = TruncationPolicy::adaptive();

  const FockVector vac = coherent_state(0.0, pol);
  CHECK(vac[0] == Complex(1.0, 0.0));
  CHECK(vac.tail_mass(1) == 0.0);

  const FockVector one = coherent_state(1.0, pol);
  CHECK(one[0].real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(one[2].real() == doctest::Approx(std::exp(-0.5) / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(one.is_normalized());

  const FockVector big = coherent_state(Complex(2.0, 1.0), pol);
  CHECK(big.is_normalized());
}

TEST_CASE("coherent state agrees with the first-principles amplitudes") {
  for (Complex alpha : {Complex(0.7, 0.0), Complex(-1.3, 0.4), Complex(0.0, 2.0)}) {
    const FockVector v = coherent_state(alpha, TruncationPolicy::adaptive());
    const Eigen::VectorXcd ref = oracles::coherent(alpha, v.dim());
    CHECK((v.amplitudes() - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("coherent state adaptive truncation errors out at max_dim") {
  CHECK_THROWS_AS(coherent_state(3.0, TruncationPolicy::adaptive(1e-12, 12)), TruncationError);
}

TEST_CASE("truncation monotonicity: growing dim only adds tail mass") {
  const FockVector small = coherent_state(1.4, TruncationPolicy::fixed(24));
  const FockVector wide = coherent_state(1.4, TruncationPolicy::fixed(48));
  const double tail = 1.0 - small.squared_norm();
  for (int n = 0; n < 24; ++n) CHECK(std::abs(small[n] - wide[n]) <= tail + 1e-15);
}

TEST_CASE("displacement operator identity and vacuum column") {
  CHECK(max_abs_diff(displacement_operator(0.0, 16), Eigen::MatrixXcd::Identity(16, 16)) < 1e-14);

  const Operator d = displacement_operator(1.0, 48);
  const FockVector coh = coherent_state(1.0, TruncationPolicy::fixed(48));
  for (int m = 0; m < 24; ++m) CHECK(std::abs(d(m, 0) - coh[m]) < 1e-10);
}

TEST_CASE("displacement operator matches the matrix-exponential oracle") {
  const int dim = 64;
  const double beta = 1.5;
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) {
    gen(n + 1, n) = beta * std::sqrt(n + 1.0);   // beta b^dag
    gen(n, n + 1) = -beta * std::sqrt(n + 1.0);  // -beta b
  }
  const Eigen::MatrixXcd ref = oracles::expm(gen);
  const Operator d = displacement_operator(beta, dim);
  CHECK(max_abs_diff(d.topLeftCorner(32, 32), ref.topLeftCorner(32, 32)) < 1e-8);

  const Eigen::MatrixXcd prod = d * displacement_operator(-beta, dim);
  CHECK(max_abs_diff(prod.topLeftCorner(32, 32), Eigen::MatrixXcd::Identity(32, 32)) < 1e-8);
}

TEST_CASE("displacement unitarity on the low subblock") {
  // The exact operator compressed to (4|beta|)^2 + 20 levels already carries
  // corner tails of ~8e-8, so the 1e-8 check runs with 16 extra levels.
  for (Complex beta : {Complex(1.0, 0.0), Complex(1.2, 0.3), Complex(0.0, -2.0)}) {
    const int dim = static_cast<int>(16.0 * std::norm(beta)) + 36;
    CHECK(low_block_unitarity_defect(displacement_operator(beta, dim)) < 1e-8);
  }
}

TEST_CASE("displacement composition law") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  const int dim = 72;
  for (int trial = 0; trial < 6; ++trial) {
    const Complex a(unif(rng), unif(rng) * 0.5);
    const Complex b(unif(rng), unif(rng) * 0.5);
    const Complex phase = std::exp(Complex(0.0, std::imag(a * std::conj(b))));
    const Eigen::MatrixXcd lhs = displacement_operator(a, dim) * displacement_operator(b, dim);
    const Eigen::MatrixXcd rhs = phase * displacement_operator(a + b, dim);
    CHECK(max_abs_diff(lhs.topLeftCorner(36, 36), rhs.topLeftCorner(36, 36)) < 1e-7);
  }
}

TEST_CASE("displaced Fock states") {
  const TruncationPolicy pol = TruncationPolicy::adaptive();

  const FockVector plain = displaced_fock(0.0, 3, pol);
  CHECK(std::abs(plain[3] - Complex(1.0)) < 1e-14);
  CHECK(plain.tail_mass(4) < 1e-14);

  for (int n = 0; n <= 5; ++n) {
    const FockVector dn = displaced_fock(1.0, n, pol);
    CHECK(dn.is_normalized(1e-10));
    for (int m = 0; m <= 5; ++m) {
      const FockVector dm = displaced_fock(1.0, m, pol);
      const double expect = (m == n) ? 1.0 : 0.0;
      CHECK(std::abs(dn.overlap(dm) - expect) < 1e-8);
    }
  }
}

TEST_CASE("overlap law <coherent(-beta)|n>") {
  // <-beta|n> = (-beta)^n e^{-beta^2/2} / sqrt(n!)
  for (double beta : {0.25, 0.5, 1.0, 2.0}) {
    const FockVector coh = coherent_state(-beta, TruncationPolicy::adaptive());
    double expected = std::exp(-0.5 * beta * beta);
    for (int n = 0; n <= 8; ++n) {
      if (n > 0) expected *= -beta / std::sqrt(double(n));
      CHECK(std::abs(coh.overlap(basis_state(n, coh.dim())) - expected) < 1e-9);
    }
  }
  const FockVector cm1 = coherent_state(-1.0, TruncationPolicy::adaptive());
  CHECK(cm1.overlap(basis_state(1, cm1.dim())).real() ==
        doctest::Approx(-std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("free evolution phases") {
  CHECK(max_abs_diff(free_phases(0.0, 8), Eigen::MatrixXcd::Identity(8, 8)) == 0.0);
  CHECK(max_abs_diff(free_phases(2.0 * M_PI, 8), -Eigen::MatrixXcd::Identity(8, 8)) < 1e-12);

  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(12);
  for (int i = 0; i < 12; ++i) v[i] = Complex(g(rng), g(rng));
  const double before = v.norm();
  apply_free_phases(1.7, v);
  CHECK(v.norm() == doctest::Approx(before).epsilon(1e-14));
}

TEST_CASE("photon-present evolution") {
  const TruncationPolicy pol = TruncationPolicy::adaptive();

  SUBCASE("decouples to free evolution at beta = 0") {
    const Operator u = photon_present_evolution(1.3, 0.0, pol);
    CHECK(max_abs_diff(u, free_phases(1.3, static_cast<int>(u.rows()))) < 1e-13);
  }

  SUBCASE("displaced Fock states are eigenvectors") {
    const double beta = 1.0, t = 2.3;
    const Operator u = photon_present_evolution(t, beta, pol);
    const int dim = static_cast<int>(u.rows());
    for (int n = 0; n <= 4; ++n) {
      const FockVector dn = displaced_fock(beta, n, TruncationPolicy::fixed(dim));
      const Eigen::VectorXcd lhs = u * dn.amplitudes();
      const Eigen::VectorXcd rhs =
          std::polar(1.0, -(n + 0.5 - beta * beta) * t) * dn.amplitudes();
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  SUBCASE("matches the dense matrix-exponential oracle") {
    const double beta = 1.0, t = 2.0 * M_PI;
    const Operator u = photon_present_evolution(t, beta, pol);
    const int dim = static_cast<int>(u.rows());
    const Eigen::MatrixXcd ref =
        oracles::expm(Complex(0.0, -t) * oracles::cavity_hamiltonian(beta, dim));
    const Eigen::VectorXcd coh = oracles::coherent(0.3, dim);
    CHECK(((u * coh) - (ref * coh)).cwiseAbs().maxCoeff() < 1e-7);
  }

  SUBCASE("unitary on the low subblock") {
    CHECK(low_block_unitarity_defect(photon_present_evolution(2.3, 1.0, pol)) < 1e-8);
  }
}

TEST_CASE("policy and vector validation") {
  CHECK_THROWS_AS(TruncationPolicy::fixed(0), std::invalid_argument);
  CHECK_THROWS_AS(TruncationPolicy::adaptive(1e-3), std::invalid_argument);
  CHECK_THROWS_AS(displacement_operator(1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(displaced_fock(1.0, -1, TruncationPolicy::adaptive()), std::invalid_argument);

  FockVector bad(3);
  bad[1] = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(bad.require_finite(), std::invalid_argument);

  const FockVector coh = coherent_state(2.0, TruncationPolicy::adaptive());
  CHECK_THROWS_AS(coh.resized(4), TruncationError);
  CHECK(coh.resized(coh.dim() + 10).dim() == coh.dim() + 10);
}
