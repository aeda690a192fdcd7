#pragma once

// Synthetic homodyne data: draws shot-noise-normalised quadrature values from
// the exact marginals of a known state, and the dataset CSV format shared
// with user-supplied laboratory data.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "catsim/fock.hpp"

namespace catsim {

/// LO phases in degrees and the number of draws at each.
struct PhasePlan {
  std::vector<double> phases_deg{-45.0, -22.5, 0.0, 22.5, 45.0, 90.0};
  int samples_per_phase = 10000;

  void validate() const;
  friend bool operator==(const PhasePlan&, const PhasePlan&) = default;
};

struct HomodyneRecord {
  double theta_deg;
  double q;
  friend bool operator==(const HomodyneRecord&, const HomodyneRecord&) = default;
};

struct PhaseCount {
  double theta_deg;
  std::size_t count;
  friend bool operator==(const PhaseCount&, const PhaseCount&) = default;
};

struct DatasetMeta {
  std::string source;
  std::uint64_t seed = 0;
  std::vector<PhaseCount> counts;  ///< in order of first appearance
  double shot_noise_variance = 0.5;
  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

struct HomodyneDataset {
  std::vector<HomodyneRecord> records;
  DatasetMeta meta;

  /// Throws SchemaError if records and declared counts disagree or a value is not finite.
  void validate() const;
  std::vector<double> phases_deg() const;
  /// Quadratures rescaled to vacuum variance 1/2.
  double normalization() const;
  friend bool operator==(const HomodyneDataset&, const HomodyneDataset&) = default;
};

inline constexpr int kInverseCdfPoints = 4096;
inline constexpr double kMinimumGridMass = 0.999;

/// Tabulated inverse CDF of Pr(q | theta) with linear interpolation.
class MarginalSampler {
 public:
  MarginalSampler(const DensityMatrix& rho, Angle theta);
  double operator()(double u) const;
  double grid_mass() const { return mass_; }
  double min() const { return q_(0); }
  double max() const { return q_(q_.size() - 1); }

 private:
  RVector q_;
  RVector cdf_;
  double mass_ = 0.0;
};

std::vector<double> sample_phase(const DensityMatrix& rho, Angle theta, std::size_t count,
                                 std::uint64_t seed);

HomodyneDataset synth_dataset(const DensityMatrix& rho, const PhasePlan& plan, std::uint64_t seed,
                              std::string source = {});

/// Header `theta_deg,q`, preceded by `#key=value` metadata lines.
void write_dataset(std::ostream& out, const HomodyneDataset& dataset);
HomodyneDataset read_dataset(std::istream& in);
void save_dataset(const HomodyneDataset& dataset, const std::filesystem::path& path);
HomodyneDataset load_dataset(const std::filesystem::path& path);

}  // namespace catsim
