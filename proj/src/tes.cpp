#include "catsim/tes.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "catsim/io.hpp"
#include "catsim/random.hpp"

namespace catsim {
namespace {

constexpr double kFwhmToSigma = 2.354820045030949;  // 2 sqrt(2 ln 2)
constexpr int kSmoothingWindow = 5;
constexpr long long kTrialsPerStream = 4096;

// Unit-height pulse shape at time t after onset.
double pulse_shape(double t, const TesParams& p) {
  if (t < 0.0) return 0.0;
  if (p.rise_tau_ns <= 0.0) return std::exp(-t / p.decay_tau_ns);
  const double td = p.decay_tau_ns;
  const double tr = p.rise_tau_ns;
  const double t_peak = std::log(td / tr) * td * tr / (td - tr);
  const double peak = std::exp(-t_peak / td) - std::exp(-t_peak / tr);
  return (std::exp(-t / td) - std::exp(-t / tr)) / peak;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

RVector synthesize(int n, const TesParams& p, const RVector& unit, Engine& engine) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double jitter = p.energy_sigma_ev() / p.photon_energy_ev;
  const double height = double(n) + (jitter > 0.0 ? jitter * gauss(engine) : 0.0);
  RVector trace = height * unit;
  if (p.noise_floor > 0.0) {
    for (Eigen::Index i = 0; i < trace.size(); ++i) trace(i) += p.noise_floor * gauss(engine);
  }
  return trace;
}

}  // namespace

double TesParams::energy_sigma_ev() const {
  return convention == ResolutionConvention::Fwhm ? energy_resolution_ev / kFwhmToSigma
                                                  : energy_resolution_ev;
}

void TesParams::validate() const {
  if (!(photon_energy_ev > 0.0)) throw DomainError("photon energy must be > 0");
  if (!(energy_resolution_ev >= 0.0)) throw DomainError("energy resolution must be >= 0");
  if (!(energy_resolution_ev < photon_energy_ev)) {
    throw DomainError("energy resolution must be below the photon energy");
  }
  if (!(decay_tau_ns > 0.0)) throw DomainError("decay time must be > 0");
  if (!(rise_tau_ns >= 0.0) || (rise_tau_ns > 0.0 && !(rise_tau_ns < decay_tau_ns))) {
    throw DomainError("rise time must be 0 or shorter than the decay time");
  }
  if (!(rep_period_ns > 0.0) || !(sample_interval_ns > 0.0)) {
    throw DomainError("repetition period and sample interval must be > 0");
  }
  if (pretrigger_samples < 0 || samples_per_trace <= pretrigger_samples + kSmoothingWindow) {
    throw DomainError("trace too short for the pre-trigger window");
  }
  if (!(noise_floor >= 0.0)) throw DomainError("noise floor must be >= 0");
}

RVector render_pulse(double height, double onset_ns, const TesParams& params) {
  RVector trace(params.samples_per_trace);
  for (Eigen::Index i = 0; i < trace.size(); ++i) {
    trace(i) = height * pulse_shape(double(i) * params.sample_interval_ns - onset_ns, params);
  }
  return trace;
}

RVector pulse_trace(int n_photons, const TesParams& params, std::uint64_t seed) {
  params.validate();
  if (n_photons < 0) throw DomainError("photon number must be >= 0");
  const RVector unit = render_pulse(1.0, params.pretrigger_samples * params.sample_interval_ns, params);
  Engine engine(seed);
  return synthesize(n_photons, params, unit, engine);
}

PulseClassification classify_pulse(const RVector& trace, const TesParams& params, int n_max) {
  if (trace.size() != params.samples_per_trace) throw DimensionMismatch("trace length mismatch");
  const Eigen::Index pre = params.pretrigger_samples;
  const double dt = params.sample_interval_ns;

  double baseline_level = 0.0;
  double baseline_time = 0.0;
  if (pre > 0) {
    baseline_level = trace.head(pre).mean();
    baseline_time = 0.5 * double(pre - 1) * dt;
  }

  const Eigen::Index half = kSmoothingWindow / 2;
  Eigen::Index best = -1;
  double best_value = 0.0;
  for (Eigen::Index i = std::max(pre, half); i + half < trace.size(); ++i) {
    const double v = trace.segment(i - half, kSmoothingWindow).mean();
    if (best < 0 || v > best_value) {
      best = i;
      best_value = v;
    }
  }
  const double baseline =
      baseline_level * std::exp(-(double(best) * dt - baseline_time) / params.decay_tau_ns);

  PulseClassification out;
  out.height = best_value - baseline;
  const long long assigned = std::max(0LL, std::llround(out.height));
  if (assigned > n_max) {
    out.saturated = true;
    out.photons = n_max;
  } else {
    out.photons = int(assigned);
  }
  return out;
}

double ConfusionMatrix::off_diagonal_mass() const {
  return probabilities.sum() - probabilities.trace();
}

ConfusionMatrix confusion(const TesParams& params, int n_max, long long trials, std::uint64_t seed) {
  params.validate();
  if (n_max < 0) throw DomainError("n_max must be >= 0");
  if (trials < 1000) throw DomainError("confusion needs at least 1000 trials");
  const RVector unit = render_pulse(1.0, params.pretrigger_samples * params.sample_interval_ns, params);
  const long long per_row = trials / (n_max + 1);
  ConfusionMatrix out{n_max, RMatrix::Zero(n_max + 1, n_max + 1)};
  for (int n = 0; n <= n_max; ++n) {
    for (long long start = 0; start < per_row; start += kTrialsPerStream) {
      Engine engine(derive_seed(seed, {std::uint64_t(n), std::uint64_t(start)}));
      const long long stop = std::min(per_row, start + kTrialsPerStream);
      for (long long t = start; t < stop; ++t) {
        const RVector trace = synthesize(n, params, unit, engine);
        out.probabilities(n, classify_pulse(trace, params, n_max).photons) += 1.0;
      }
    }
    out.probabilities.row(n) /= double(per_row);
  }
  return out;
}

double adjacent_confusion_analytic(const TesParams& params) {
  const double sigma = params.energy_sigma_ev();
  if (sigma == 0.0) return 0.0;
  return 0.5 * std::erfc(params.photon_energy_ev / (2.0 * std::sqrt(2.0) * sigma));
}

ConfusionMatrix confusion_analytic(const TesParams& params, int n_max) {
  const double s = params.energy_sigma_ev() / params.photon_energy_ev;
  ConfusionMatrix out{n_max, RMatrix::Zero(n_max + 1, n_max + 1)};
  for (int n = 0; n <= n_max; ++n) {
    for (int k = 0; k <= n_max; ++k) {
      if (s == 0.0) {
        out.probabilities(n, k) = n == k ? 1.0 : 0.0;
        continue;
      }
      const double hi = k == n_max ? 1.0 : normal_cdf((k + 0.5 - n) / s);
      const double lo = k == 0 ? 0.0 : normal_cdf((k - 0.5 - n) / s);
      out.probabilities(n, k) = hi - lo;
    }
  }
  return out;
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& m) {
  out << "true\\assigned";
  for (int k = 0; k <= m.n_max; ++k) out << ',' << k;
  out << '\n';
  for (int n = 0; n <= m.n_max; ++n) {
    out << n;
    for (int k = 0; k <= m.n_max; ++k) out << ',' << format_double(m.probabilities(n, k));
    out << '\n';
  }
}

}  // namespace catsim
