#pragma once

// Transition-edge-sensor response: double-exponential pulses whose height
// carries the absorbed energy, and peak-height photon-number assignment.
// Trace values are in units of the single-photon pulse height.

#include <cstdint>
#include <iosfwd>

#include "catsim/fock.hpp"

namespace catsim {

/// How the quoted energy resolution maps to a Gaussian width.
enum class ResolutionConvention { Fwhm, Sigma };

struct TesParams {
  double photon_energy_ev = 0.8;
  double energy_resolution_ev = 0.176;
  double decay_tau_ns = 107.0;
  double rise_tau_ns = 15.0;  ///< 0 gives an instantaneous rise
  double rep_period_ns = 200.0;
  double sample_interval_ns = 1.0;
  int samples_per_trace = 256;
  int pretrigger_samples = 20;
  double noise_floor = 0.005;  ///< white trace noise, relative to the single-photon height
  ResolutionConvention convention = ResolutionConvention::Fwhm;

  /// Gaussian sigma of the measured energy, in eV.
  double energy_sigma_ev() const;
  void validate() const;
  friend bool operator==(const TesParams&, const TesParams&) = default;
};

/// Noiseless pulse of the given height starting at `onset_ns` (trace time 0
/// is the first sample).
RVector render_pulse(double height, double onset_ns, const TesParams& params);

/// Pulse for n absorbed photons: height n plus energy jitter, plus white noise.
RVector pulse_trace(int n_photons, const TesParams& params, std::uint64_t seed);

struct PulseClassification {
  int photons = 0;
  bool saturated = false;  ///< estimate exceeded n_max and was clamped
  double height = 0.0;     ///< baseline-corrected peak height
};

/// Nearest-integer assignment of the peak height above baseline. The baseline
/// is the pre-trigger mean, extrapolated along the decay of any earlier pulse.
PulseClassification classify_pulse(const RVector& trace, const TesParams& params, int n_max);

struct ConfusionMatrix {
  int n_max = 0;
  RMatrix probabilities;  ///< (true n, assigned n); rows sum to 1

  double off_diagonal_mass() const;
};

/// Monte Carlo over `trials` traces split evenly across true n = 0..n_max.
ConfusionMatrix confusion(const TesParams& params, int n_max, long long trials, std::uint64_t seed);

/// erfc(E / (2 sqrt2 sigma_E)) / 2: probability of crossing one half-integer threshold.
double adjacent_confusion_analytic(const TesParams& params);
ConfusionMatrix confusion_analytic(const TesParams& params, int n_max);

/// CSV with header `true\assigned,0,1,...`.
void write_confusion_csv(std::ostream& out, const ConfusionMatrix& m);

}  // namespace catsim
