#include <algorithm>
#include <cmath>
#include <numbers>

#include "catsim/channels.hpp"
#include "catsim/phase_space.hpp"
#include "catsim/tomography.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace catsim;

namespace {

HomodyneDataset sample(const DensityMatrix& rho, int per_phase, std::uint64_t seed,
                       std::vector<double> phases = {-45.0, -22.5, 0.0, 22.5, 45.0, 90.0}) {
  PhasePlan plan;
  plan.phases_deg = std::move(phases);
  plan.samples_per_phase = per_phase;
  return synth_dataset(rho, plan, seed);
}

MleConfig config(int cutoff, std::optional<double> bin_width = std::nullopt) {
  MleConfig cfg;
  cfg.cutoff = cutoff;
  cfg.bin_width = bin_width;
  return cfg;
}

}  // namespace

TEST_CASE("projector elements") {
  const CMatrix p = povm_projector(Angle::degrees(30.0), 0.0, 6);
  CHECK(p(0, 0).real() == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)));
  CHECK(std::abs(p(1, 1)) < 1e-15);
  CHECK((p - p.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  const double q = 0.8;
  double direct = 0.0;
  for (int n = 0; n <= 6; ++n) direct += std::pow(oracle::hermite_function(n, q), 2);
  CHECK(povm_projector(Angle::degrees(70.0), q, 6).trace().real() == doctest::Approx(direct));
  // Element (n, m) carries e^{i(n-m)theta}.
  const CMatrix turned = povm_projector(Angle::degrees(90.0), q, 6);
  CHECK(std::abs(turned(1, 0) - Complex(0.0, 1.0) * oracle::hermite_function(1, q) * oracle::hermite_function(0, q)) <
        1e-14);
}

TEST_CASE("log-likelihood values") {
  const DensityMatrix one = DensityMatrix::fock(1, HilbertConfig(8));
  HomodyneDataset ds = sample(one, 200, 3, {0.0, 60.0});
  const int cutoff = 8;
  CMatrix mixed = CMatrix::Identity(cutoff + 1, cutoff + 1) / double(cutoff + 1);
  double expected = 0.0;
  for (const auto& r : ds.records) {
    double s = 0.0;
    for (int n = 0; n <= cutoff; ++n) s += std::pow(oracle::hermite_function(n, r.q), 2);
    expected += std::log(s / (cutoff + 1));
  }
  CHECK(log_likelihood(DensityMatrix(mixed), ds) == doctest::Approx(expected).epsilon(1e-12));

  const double ll_true = log_likelihood(one, ds);
  CHECK(ll_true > log_likelihood(DensityMatrix::vacuum(HilbertConfig(8)), ds));
  std::reverse(ds.records.begin(), ds.records.end());
  CHECK(log_likelihood(one, ds) == doctest::Approx(ll_true).epsilon(1e-13));
}

TEST_CASE("zero-probability records are named") {
  HomodyneDataset ds;
  ds.records = {{0.0, 0.5}, {0.0, 0.0}};
  ds.meta.counts = {{0.0, 2}};
  try {
    log_likelihood(DensityMatrix::fock(1, HilbertConfig(3)), ds);
    FAIL("expected SingularLikelihoodError");
  } catch (const SingularLikelihoodError& e) {
    CHECK(std::string(e.what()).find("[1]") != std::string::npos);
  }
}

TEST_CASE("vacuum is reconstructed") {
  // The estimate sits on the positivity boundary, so upward variance
  // fluctuations of the data turn into photon number of order 1e-3.
  const MleResult fit = mle_reconstruct(sample(DensityMatrix::vacuum(HilbertConfig(5)), 10000, 1), config(6, 0.02));
  CHECK(fit.diagnostics.converged);
  CHECK(fidelity(fit.rho, DensityMatrix::vacuum(HilbertConfig(6))) > 0.995);
  CHECK(mean_photon(fit.rho) < 0.01);
}

TEST_CASE("likelihood increases monotonically and the result is a fixed point") {
  const DensityMatrix truth = loss_channel(
      DensityMatrix::from_state(cat_state(Complex(0.0, 1.0), CatParity::Odd, HilbertConfig(10))), 0.8);
  const HomodyneDataset ds = sample(truth, 100000 / 6, 17);
  const MleResult fit = mle_reconstruct(ds, config(10));
  const auto& trace = fit.diagnostics.log_likelihood_trace;
  REQUIRE(trace.size() > 2);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-9 * std::abs(trace[i - 1]));
  CHECK(fit.diagnostics.converged);
  CHECK(trace_distance(fit.rho, truth) < 0.05);
  CHECK(fit.diagnostics.final_log_likelihood == doctest::Approx(log_likelihood(fit.rho, ds)).epsilon(1e-9));
  CHECK(fit.diagnostics.final_log_likelihood >= log_likelihood(truth, ds));
}

TEST_CASE("heralded two-photon state is reconstructed") {
  const ExperimentParams params = ExperimentParams::paper_default();
  const DensityMatrix truth = HeraldingModel(params, HilbertConfig(params.cutoff)).branch(2).state;
  const MleResult fit = mle_reconstruct(sample(truth, 10000, 5), config(15, 0.02));
  CHECK(fidelity(fit.rho, with_cutoff(truth, 15)) >= 0.99);
}

TEST_CASE("single-phase data warns and reproduces the marginal") {
  const DensityMatrix truth = DensityMatrix::from_state(squeezed_vacuum(SqueezeSpec::from_r(0.3), HilbertConfig(20)));
  const HomodyneDataset ds = sample(truth, 20000, 8, {0.0});
  const MleResult fit = mle_reconstruct(ds, config(10));
  REQUIRE_FALSE(fit.diagnostics.warnings.empty());
  CHECK(fit.diagnostics.warnings.front().find("single LO phase") != std::string::npos);
  const QuadAxis axis = default_quad_axis();
  const RVector a = marginal(fit.rho, Angle::degrees(0.0), axis);
  const RVector b = marginal(truth, Angle::degrees(0.0), axis);
  double ca = 0.0, cb = 0.0, ks = 0.0;
  for (Eigen::Index i = 0; i < axis.size(); ++i) {
    ca += a(i) * axis.step();
    cb += b(i) * axis.step();
    ks = std::max(ks, std::abs(ca - cb));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("bootstrap error bars") {
  SUBCASE("vacuum photon number is tight") {
    const HomodyneDataset ds = sample(DensityMatrix::vacuum(HilbertConfig(4)), 10000, 2);
    const BootstrapReport rep = bootstrap(ds, config(5, 0.02), 100, 99);
    CHECK(rep.succeeded == 100);
    CHECK(rep.mean_photon.sigma < 0.01);
    CHECK(rep.photon_distribution.size() == 6);
  }
  SUBCASE("tiny dataset still gives finite spread") {
    const HomodyneDataset ds = sample(DensityMatrix::fock(1, HilbertConfig(3)), 5, 4, {0.0, 90.0});
    const BootstrapReport rep = bootstrap(ds, config(3), 10, 1);
    CHECK(std::isfinite(rep.wigner_origin.sigma));
    CHECK(rep.wigner_origin.sigma > 0.0);
  }
  SUBCASE("result does not depend on the thread count") {
    const HomodyneDataset ds = sample(DensityMatrix::fock(1, HilbertConfig(3)), 300, 6);
    const BootstrapReport one = bootstrap(ds, config(4, 0.05), 6, 12, 1);
    const BootstrapReport three = bootstrap(ds, config(4, 0.05), 6, 12, 3);
    CHECK(one.wigner_origin.mean == three.wigner_origin.mean);
    CHECK(one.wigner_origin.sigma == three.wigner_origin.sigma);
    CHECK(one.mean_photon.sigma == three.mean_photon.sigma);
  }
  CHECK_THROWS_AS(bootstrap(sample(DensityMatrix::vacuum(HilbertConfig(2)), 10, 1), config(3), 1, 0),
                  DomainError);
}

TEST_CASE("configuration validation") {
  MleConfig cfg;
  cfg.cutoff = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.bin_width = -0.1;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  CHECK_THROWS_AS(mle_reconstruct(HomodyneDataset{}, MleConfig{}), DomainError);
}
