#pragma once

// Maximum-likelihood homodyne tomography by the iterative R rho R map, with
// stratified bootstrap error bars. No detector-efficiency compensation of any
// kind is applied.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "catsim/fock.hpp"
#include "catsim/sampler.hpp"

namespace catsim {

struct MleConfig {
  int cutoff = 15;
  int max_iterations = 2000;
  double log_likelihood_tolerance = 1e-10;  ///< relative change per iteration
  std::optional<double> bin_width;          ///< pointwise projectors when empty

  void validate() const;
  friend bool operator==(const MleConfig&, const MleConfig&) = default;
};

struct MleDiagnostics {
  int iterations = 0;
  double final_log_likelihood = 0.0;
  bool converged = false;
  int diluted_steps = 0;      ///< iterations that needed a damped step to stay monotone
  bool psd_clipped = false;
  std::vector<std::string> warnings;
  std::vector<double> log_likelihood_trace;  ///< value before each iteration, then the final one
};

struct MleResult {
  DensityMatrix rho;
  MleDiagnostics diagnostics;
};

/// |q_theta><q_theta| truncated to the Fock cutoff:
/// element (n, m) = psi_n(q) psi_m(q) e^{i(n-m)theta}.
CMatrix povm_projector(Angle theta, double q, int cutoff);

/// sum_j ln Tr(Pi_j rho). Throws SingularLikelihoodError naming every record
/// with zero probability.
double log_likelihood(const DensityMatrix& rho, const HomodyneDataset& dataset);

MleResult mle_reconstruct(const HomodyneDataset& dataset, const MleConfig& cfg);

/// Mean and sample standard deviation over bootstrap replicas.
struct Estimate {
  double mean = 0.0;
  double sigma = 0.0;
};

struct BootstrapReport {
  int replicas = 1000;
  int succeeded = 0;
  std::vector<std::string> failures;
  std::vector<Estimate> photon_distribution;  ///< rho_{n,n}
  Estimate mean_photon;
  Estimate wigner_origin;
  Estimate peak_off_diagonal;  ///< Re rho(p, -p) at the diagonal peak
};

inline constexpr double kMinimumBootstrapSuccess = 0.9;

/// Resamples records with replacement within each phase, reconstructs each
/// replica and aggregates. Deterministic for a fixed seed regardless of
/// thread count.
BootstrapReport bootstrap(const HomodyneDataset& dataset, const MleConfig& cfg, int replicas,
                          std::uint64_t seed, unsigned threads = 0);

}  // namespace catsim
