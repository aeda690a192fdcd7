#include <cmath>

#include "catsim/channels.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace catsim;

namespace {

CMatrix random_state(int cutoff, unsigned seed) {
  std::srand(seed);
  const CMatrix g = CMatrix::Random(cutoff + 1, cutoff + 1);
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("loss channel agrees with a beam splitter against vacuum") {
  const CMatrix rho = random_state(7, 3);
  for (double eta : {0.0, 0.3, 0.85, 1.0}) {
    CHECK(max_abs(loss_channel(rho, eta) - oracle::lossy(rho, eta)) < 1e-12);
  }
}

TEST_CASE("loss composes multiplicatively") {
  const CMatrix rho = random_state(8, 5);
  CHECK(max_abs(loss_channel(loss_channel(rho, 0.9), 0.5) - loss_channel(rho, 0.45)) < 1e-10);
  CHECK(max_abs(loss_channel(rho, 1.0) - rho) < 1e-15);
  CHECK(std::abs(loss_channel(rho, 0.37).trace().real() - 1.0) < 1e-12);
  CHECK_THROWS_AS(loss_channel(rho, 1.2), DomainError);
}

TEST_CASE("loss of a single photon") {
  const DensityMatrix one = DensityMatrix::fock(1, HilbertConfig(6));
  const DensityMatrix out = loss_channel(one, 0.85);
  CHECK(out(1, 1).real() == doctest::Approx(0.85));
  CHECK(fidelity(DensityMatrix::vacuum(HilbertConfig(6)), out) == doctest::Approx(0.15).epsilon(1e-12));
}

TEST_CASE("beam splitter amplitudes and budget") {
  const StateVector two(CVector::Unit(3, 2));
  const TwoModeState joint = beamsplitter_join(two, 0.81, 4);
  CHECK(std::norm(joint.amplitudes(2, 0)) == doctest::Approx(0.81 * 0.81));
  CHECK(std::norm(joint.amplitudes(1, 1)) == doctest::Approx(2 * 0.81 * 0.19));
  CHECK(std::norm(joint.amplitudes(0, 2)) == doctest::Approx(0.19 * 0.19));
  CHECK(joint.discarded_weight < 1e-15);
  CHECK(beamsplitter_join(two, 0.5, 1).discarded_weight == doctest::Approx(0.25));
  CHECK_THROWS_AS(beamsplitter_join(two, 0.5, 100, 50), TruncationBudgetError);
  CHECK_THROWS_AS(beamsplitter_join(two, 0.0, 4), DomainError);
}

TEST_CASE("lossy number POVM sums to identity") {
  const int cutoff = 10;
  RVector total = RVector::Zero(cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) total += lossy_number_povm(n, 0.4, cutoff);
  CHECK((total - RVector::Ones(cutoff + 1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("idler POVM equals idler loss followed by ideal counting") {
  const StateVector sq = squeezed_vacuum(SqueezeSpec::from_r(0.3), HilbertConfig(8), 1.0);
  const TwoModeState joint = beamsplitter_join(sq, 0.81, 8);
  const double eta = 0.4;
  for (int n = 0; n <= 4; ++n) {
    CMatrix via_channel = CMatrix::Zero(9, 9);
    for (Eigen::Index i = 0; i < 9; ++i) {
      CMatrix idler = CMatrix::Zero(9, 9);
      idler(i, i) = 1.0;
      const double w = oracle::lossy(idler, eta)(n, n).real();
      via_channel += w * joint.amplitudes.col(i) * joint.amplitudes.col(i).adjoint();
    }
    CHECK(max_abs(via_channel - project_idler(joint, lossy_number_povm(n, eta, 8))) < 1e-10);
  }
}

TEST_CASE("heralding matches a brute-force multimode calculation") {
  // Signal (mode 0), idler (mode 1) and the idler-loss environment (mode 2),
  // propagated with explicit beam-splitter unitaries.
  const int cutoff = 8;
  const double r = 0.25, R = 0.9, opa_loss = 0.05, eta_i = 0.4, eta_s = 0.85;
  ExperimentParams params;
  params.squeeze = SqueezeSpec::from_r(r);
  params.opa_loss = opa_loss;
  params.bs_reflectivity = R;
  params.idler_efficiency = eta_i;
  params.signal_efficiency = eta_s;
  params.cutoff = cutoff;
  params.idler_cutoff = cutoff;
  const HeraldingModel model(params, HilbertConfig(cutoff));

  CVector psi = oracle::squeezed_amplitudes(r, cutoff);
  psi.normalize();
  const CMatrix after_opa = oracle::lossy(psi * psi.adjoint(), 1.0 - opa_loss);
  const oracle::ModeSpace three{3, cutoff};
  CMatrix vac = CMatrix::Zero(cutoff + 1, cutoff + 1);
  vac(0, 0) = 1.0;
  const CMatrix rho0 = oracle::kron(vac, oracle::kron(vac, after_opa));
  const CMatrix u = three.beamsplitter(1, 2, eta_i) * three.beamsplitter(0, 1, R);
  const CMatrix rho = u * rho0 * u.adjoint();

  const int d = cutoff + 1;
  for (int n = 0; n <= 3; ++n) {
    CMatrix signal = CMatrix::Zero(d, d);
    for (int s = 0; s < d; ++s)
      for (int t = 0; t < d; ++t)
        for (int k = 0; k < d; ++k) signal(s, t) += rho(s + d * n + d * d * k, t + d * n + d * d * k);
    const double probability = signal.trace().real();
    const CMatrix expected = oracle::lossy(signal / probability, eta_s);
    const HeraldResult got = model.branch(n);
    CHECK(got.herald_probability == doctest::Approx(probability).epsilon(1e-10));
    CHECK(max_abs(got.state.matrix() - expected) < 1e-10);
  }
}

TEST_CASE("lossless heralding preserves parity") {
  const HeraldingModel model(ExperimentParams::lossless(), HilbertConfig(30));
  for (int n = 0; n <= 4; ++n) {
    const RVector pn = photon_distribution(model.branch(n).state);
    double off = 0.0;
    for (Eigen::Index k = (n + 1) % 2; k < pn.size(); k += 2) off += pn(k);
    CHECK(off < 1e-12);
  }
}

TEST_CASE("lossless single-photon subtraction approaches a S|0>") {
  ExperimentParams params = ExperimentParams::lossless();
  params.squeeze = SqueezeSpec::from_r(0.4);
  params.bs_reflectivity = 0.99;
  params.herald_n = 1;
  const DensityMatrix heralded = herald_subtract(params, HilbertConfig(30)).state;
  const StateVector ideal = apply_annihilation(squeezed_vacuum(params.squeeze, HilbertConfig(30))).state;
  CHECK(fidelity(heralded, DensityMatrix::from_state(ideal)) > 0.999);
}

TEST_CASE("herald probabilities and rates") {
  const ExperimentParams params = ExperimentParams::paper_default();
  const auto table = count_rate_table(params, params.idler_cutoff);
  double total = 0.0;
  for (const auto& row : table) {
    total += row.probability;
    CHECK(row.rate_cps == doctest::Approx(row.probability * 5e6 * 0.5));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t n = 1; n < 6; ++n) CHECK(table[n].probability < table[n - 1].probability);
  const HeraldResult b2 = HeraldingModel(params, HilbertConfig(params.cutoff)).branch(2);
  CHECK(b2.herald_probability == doctest::Approx(table[2].probability));
}

TEST_CASE("parameter validation") {
  ExperimentParams p;
  p.idler_efficiency = 1.5;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = {};
  p.duty_cycle = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = {};
  p.idler_cutoff = 4;
  CHECK_THROWS_AS(HeraldingModel(p, HilbertConfig(30)), TruncationError);
}
