#pragma once

// Loss, beam splitter and lossy photon counting, composed into the heralded
// photon-subtraction pipeline:
//
//   squeezed vacuum -> OPA loss -> beam splitter (R) -> n-photon herald on the
//   idler (efficiency eta_i) -> trace out idler -> signal loss (eta_s).

#include <cstddef>
#include <vector>

#include "catsim/fock.hpp"

namespace catsim {

struct ExperimentParams {
  SqueezeSpec squeeze = SqueezeSpec::from_db(6.5);
  double opa_loss = 0.05;
  double bs_reflectivity = 0.81;
  double idler_efficiency = 0.40;
  double signal_efficiency = 0.85;
  int herald_n = 0;
  double rep_rate_hz = 5e6;
  double duty_cycle = 0.5;
  int cutoff = kDefaultCutoff;
  int idler_cutoff = 16;

  static ExperimentParams paper_default() { return {}; }
  /// R and the squeezing as given, every loss switched off.
  static ExperimentParams lossless();

  /// Throws DomainError on any out-of-range field.
  void validate() const;
  friend bool operator==(const ExperimentParams&, const ExperimentParams&) = default;
};

struct HeraldResult {
  DensityMatrix state;        ///< normalised signal mode
  double herald_probability;  ///< per pulse
  double estimated_rate;      ///< counts per second
};

struct CountRate {
  int n;
  double probability;
  double rate_cps;
};

/// Pure two-mode state sum_{s,i} c(s,i) |s>_signal |i>_idler.
struct TwoModeState {
  CMatrix amplitudes;              ///< rows: signal photons, cols: idler photons
  double discarded_weight = 0.0;   ///< norm lost to idler truncation
};

inline constexpr std::size_t kDefaultTwoModeBudget = std::size_t{1} << 20;
inline constexpr double kIdlerDiscardTolerance = 1e-10;

/// Pure-loss channel with transmissivity eta (Kraus form).
DensityMatrix loss_channel(const DensityMatrix& rho, double eta);
CMatrix loss_channel(const CMatrix& rho, double eta);

/// Signal input on the reflected port, vacuum on the other. The signal keeps
/// amplitude sqrt(R), the idler receives sqrt(1-R).
TwoModeState beamsplitter_join(const StateVector& signal_in, double reflectivity,
                               int idler_cutoff,
                               std::size_t max_elements = kDefaultTwoModeBudget);

/// Diagonal of Pi_n = sum_{m>=n} C(m,n) eta^n (1-eta)^{m-n} |m><m| over m = 0..idler_cutoff.
RVector lossy_number_povm(int n, double eta, int idler_cutoff);

/// Unnormalised signal state (I (x) Pi) applied to a two-mode pure state, idler traced out.
CMatrix project_idler(const TwoModeState& joint, const RVector& povm_diagonal);

/// The heralding pipeline with its state-independent work (OPA loss, spectral
/// decomposition, beam splitter) done once, so branches for several herald
/// outcomes share it.
class HeraldingModel {
 public:
  HeraldingModel(const ExperimentParams& params, const HilbertConfig& config);

  /// Signal state and probability for detecting n idler photons.
  HeraldResult branch(int n) const;
  /// Unnormalised signal state before signal loss.
  CMatrix unnormalized_branch(int n) const;

  const DensityMatrix& input_state() const { return input_; }
  const ExperimentParams& params() const { return params_; }

 private:
  ExperimentParams params_;
  DensityMatrix input_;
  std::vector<double> weights_;
  std::vector<TwoModeState> components_;
};

HeraldResult herald_subtract(const ExperimentParams& params, const HilbertConfig& config);

/// One entry per n = 0..n_max.
std::vector<CountRate> count_rate_table(const ExperimentParams& params, int n_max);

}  // namespace catsim
