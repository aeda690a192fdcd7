#pragma once

// Pass/fail evaluators for the acceptance claims, computed from per-state
// summaries produced by the pipeline, plus self-contained numerical checks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "catsim/config.hpp"
#include "catsim/phase_space.hpp"
#include "catsim/tomography.hpp"

namespace catsim {

enum class CheckStatus { Pass, Fail, Skipped };

std::string_view to_string(CheckStatus status);

struct CheckResult {
  int id = 0;
  std::string title;
  CheckStatus status = CheckStatus::Skipped;
  std::string detail;
};

/// Scalar properties of one simulated state.
struct StateSummary {
  std::string id;
  std::optional<int> herald_n;
  double herald_probability = 0.0;  ///< 0 for states without a herald
  double rate_cps = 0.0;
  double mean_photon = 0.0;
  double purity = 0.0;
  double odd_weight = 0.0;
  double wigner_origin = 0.0;
  double wigner_min = 0.0;  ///< over the configured Wigner grid
  CoherenceProbe coherence{};
};

StateSummary summarize_state(const std::string& id, const DensityMatrix& rho,
                             const QuadAxis& quad_axis, const WignerGrid& wigner);

/// Closed-loop comparison of one reconstructed state with its generator.
struct ReconstructionSummary {
  std::string id;
  double fidelity = 0.0;
  double wigner_origin = 0.0;
  double simulated_wigner_origin = 0.0;
  bool log_likelihood_monotone = false;
  std::optional<Estimate> bootstrap_wigner_origin;
};

/// Relative tolerance on a log-likelihood decrease between iterations.
inline constexpr double kLikelihoodMonotoneTolerance = 1e-9;
bool log_likelihood_monotone(const std::vector<double>& trace);

CheckResult check_parity_pattern(const std::vector<StateSummary>& states);
CheckResult check_mean_photon(const std::vector<StateSummary>& states);
CheckResult check_count_rates(const std::vector<StateSummary>& states);
CheckResult check_coherence(const std::vector<StateSummary>& states);
CheckResult check_cat_panels(const std::vector<StateSummary>& states);
CheckResult check_closed_loop(const std::vector<ReconstructionSummary>& recons);
/// The sigma bound only; the dataset-size scaling needs a second bootstrap.
CheckResult check_bootstrap(const std::vector<ReconstructionSummary>& recons);
CheckResult check_wigner_oracle(std::uint64_t seed);
CheckResult check_channel_algebra();
CheckResult check_tes_discrimination(const TesSpec& spec, std::uint64_t seed);

}  // namespace catsim
