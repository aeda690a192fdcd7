#include <cmath>
#include <numbers>

#include "catsim/fock.hpp"
#include "catsim/special.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace catsim;

TEST_CASE("squeezed vacuum matches the closed-form amplitudes") {
  for (double r : {0.1, 0.576, 0.748}) {
    const StateVector psi = squeezed_vacuum(SqueezeSpec::from_r(r), HilbertConfig(80));
    const CVector expected = oracle::squeezed_amplitudes(r, 80);
    CHECK((psi.amplitudes() - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(mean_photon(psi) == doctest::Approx(std::sinh(r) * std::sinh(r)).epsilon(1e-9));
  }
}

TEST_CASE("squeezing levels convert between dB and r") {
  CHECK(squeeze_r_from_db(5.0) == doctest::Approx(0.5756).epsilon(1e-4));
  CHECK(SqueezeSpec::from_db(6.5).r() == doctest::Approx(0.748340).epsilon(1e-6));
  CHECK(squeeze_db_from_r(squeeze_r_from_db(3.3)) == doctest::Approx(3.3));
  CHECK_THROWS_AS(SqueezeSpec::from_db(-1.0), DomainError);
}

TEST_CASE("squeezed vacuum is squeezed in x") {
  const HilbertConfig config(60);
  const double r = 0.748;
  const DensityMatrix rho = DensityMatrix::from_state(squeezed_vacuum(SqueezeSpec::from_r(r), config));
  // <x^2> from the photon-number representation of x = (a + a^dag)/sqrt2.
  CMatrix a = CMatrix::Zero(config.dim(), config.dim());
  for (Eigen::Index n = 1; n < config.dim(); ++n) a(n - 1, n) = std::sqrt(double(n));
  const CMatrix x = (a + a.adjoint()) / std::sqrt(2.0);
  const CMatrix p = (a - a.adjoint()) / Complex(0.0, std::sqrt(2.0));
  CHECK((rho.matrix() * x * x).trace().real() == doctest::Approx(0.5 * std::exp(-2.0 * r)).epsilon(1e-8));
  CHECK((rho.matrix() * p * p).trace().real() == doctest::Approx(0.5 * std::exp(2.0 * r)).epsilon(1e-8));
}

TEST_CASE("truncation beyond tolerance is rejected") {
  CHECK_THROWS_AS(squeezed_vacuum(SqueezeSpec::from_db(6.5), HilbertConfig(6)), TruncationError);
  CHECK_THROWS_AS(coherent_state(Complex(0.0, 2.5), HilbertConfig(10)), TruncationError);
  CHECK(squeezed_tail_weight(0.748, 30) < 1e-6);
}

TEST_CASE("coherent states and cats") {
  const HilbertConfig config(60);
  const Complex alpha(0.0, 2.5);
  const StateVector plus = coherent_state(alpha, config);
  const StateVector minus = coherent_state(-alpha, config);
  const Complex overlap = plus.amplitudes().dot(minus.amplitudes());
  CHECK(std::abs(overlap) == doctest::Approx(std::exp(-2.0 * std::norm(alpha))).epsilon(1e-8));
  CHECK(std::abs(overlap) == doctest::Approx(3.73e-6).epsilon(1e-3));
  CHECK(mean_photon(plus) == doctest::Approx(6.25).epsilon(1e-10));

  const StateVector even = cat_state(alpha, CatParity::Even, config);
  const StateVector odd = cat_state(alpha, CatParity::Odd, config);
  for (Eigen::Index n = 0; n < config.dim(); ++n) {
    if (n % 2) CHECK(even[n] == Complex(0.0));
    else CHECK(odd[n] == Complex(0.0));
  }
  CHECK_THROWS_AS(cat_state(Complex(0.0), CatParity::Odd, config), DomainError);
  const StateVector even0 = cat_state(Complex(0.0), CatParity::Even, config);
  CHECK(std::abs(even0[0]) == doctest::Approx(1.0));
}

TEST_CASE("coherent mixture purity") {
  for (double a : {0.3, 0.7, 1.5}) {
    const DensityMatrix mix = mixed_coherent(Complex(a, 0.0), HilbertConfig(40));
    CHECK(purity(mix) == doctest::Approx((1.0 + std::exp(-4.0 * a * a)) / 2.0).epsilon(1e-10));
  }
}

TEST_CASE("density matrix invariants are enforced") {
  CMatrix bad = CMatrix::Zero(3, 3);
  bad(0, 0) = 0.5;
  CHECK_THROWS_AS(DensityMatrix{bad}, InvariantError);
  bad(1, 1) = 0.5;
  bad(0, 1) = 0.3;
  CHECK_THROWS_AS(DensityMatrix{bad}, InvariantError);  // not Hermitian
  CMatrix negative = CMatrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{negative}, InvariantError);
  CHECK_THROWS_AS(StateVector(CVector::Zero(4)), ZeroStateError);
  CHECK_THROWS_AS(HilbertConfig(0), DomainError);
}

TEST_CASE("annihilation") {
  const HilbertConfig config(20);
  const StateVector sq = squeezed_vacuum(SqueezeSpec::from_r(0.4), config);
  const Annihilated out = apply_annihilation(sq);
  CHECK(out.norm_squared == doctest::Approx(mean_photon(sq)).epsilon(1e-12));
  for (Eigen::Index n = 0; n < config.dim(); n += 2) CHECK(std::abs(out.state[n]) < 1e-15);
  CHECK_THROWS_AS(apply_annihilation(StateVector(CVector::Unit(5, 0))), ZeroStateError);
}

TEST_CASE("fidelity and trace distance") {
  const HilbertConfig config(10);
  const DensityMatrix vac = DensityMatrix::vacuum(config);
  const DensityMatrix one = DensityMatrix::fock(1, config);
  CHECK(fidelity(vac, vac) == doctest::Approx(1.0));
  CHECK(fidelity(vac, one) == doctest::Approx(0.0));
  CHECK(trace_distance(vac, one) == doctest::Approx(1.0));
  CMatrix mixed = CMatrix::Zero(config.dim(), config.dim());
  mixed(0, 0) = 0.15;
  mixed(1, 1) = 0.85;
  CHECK(fidelity(vac, DensityMatrix(mixed)) == doctest::Approx(0.15).epsilon(1e-12));
}

TEST_CASE("rotation multiplies coherences by phases") {
  const DensityMatrix rho = DensityMatrix::from_state(coherent_state(Complex(0.8, 0.0), HilbertConfig(25)));
  const DensityMatrix turned = rotate(rho, Angle::degrees(90.0));
  const DensityMatrix expected = DensityMatrix::from_state(coherent_state(Complex(0.0, -0.8), HilbertConfig(25)));
  CHECK((turned.matrix() - expected.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("with_cutoff pads and truncates") {
  const DensityMatrix rho = DensityMatrix::fock(2, HilbertConfig(4));
  const DensityMatrix padded = with_cutoff(rho, 9);
  CHECK(padded.dim() == 10);
  CHECK(std::abs(padded(2, 2) - 1.0) < 1e-15);
  const DensityMatrix mix = mixed_coherent(Complex(0.5, 0.0), HilbertConfig(20));
  const DensityMatrix cut = with_cutoff(mix, 3);
  CHECK(cut.matrix().trace().real() == doctest::Approx(1.0));
}

TEST_CASE("Hermite functions match the factorial series and are normalised") {
  for (int n = 0; n <= 10; ++n) {
    for (double q : {-3.1, -1.0, 0.0, 0.4, 2.2, 4.0}) {
      const Complex v = quadrature_wavefunction(n, q, Angle::degrees(0.0), HilbertConfig(10));
      CHECK(std::abs(v - oracle::hermite_function(n, q)) < 1e-12);
    }
  }
  const int npts = 4001;
  const double h = 24.0 / (npts - 1);
  for (int n : {0, 5, 20, 40}) {
    double norm = 0.0;
    for (int k = 0; k < npts; ++k) {
      const double q = -12.0 + k * h;
      norm += std::pow(special::hermite_functions<double>(n, q)(n), 2) * h;
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("quadrature wavefunction carries the rotation phase") {
  const HilbertConfig config(8);
  const Complex v = quadrature_wavefunction(3, 0.7, Angle::degrees(30.0), config);
  const Complex expected = oracle::hermite_function(3, 0.7) * std::exp(Complex(0.0, -3.0 * std::numbers::pi / 6.0));
  CHECK(std::abs(v - expected) < 1e-12);
}
