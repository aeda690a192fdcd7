#pragma once

// Run configuration: a flat `key = value` text file. Keys without a dot are
// the experiment parameters; dotted keys belong to the plan, mle, grid,
// bootstrap, cat and tes blocks. `preset = <name>` selects the starting point
// that the remaining keys override.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "catsim/channels.hpp"
#include "catsim/phase_space.hpp"
#include "catsim/sampler.hpp"
#include "catsim/tes.hpp"
#include "catsim/tomography.hpp"

namespace catsim {

/// Which family of states `simulate` produces.
enum class Scenario {
  Herald,  ///< input squeezed vacuum and the heralded branches
  Cats,    ///< even, odd and lossy even cats plus the coherent mixture
};

struct GridSpec {
  double min = -6.0;
  double max = 6.0;
  int count = 241;

  QuadAxis axis() const { return QuadAxis::uniform(min, max, count); }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct CatSpec {
  Complex alpha{0.0, 2.5};
  double loss = 0.3;  ///< fraction of energy lost by the lossy even cat
  friend bool operator==(const CatSpec&, const CatSpec&) = default;
};

struct BootstrapSpec {
  int replicas = 100;  ///< 0 disables the bootstrap
  std::optional<double> bin_width = 0.02;
  friend bool operator==(const BootstrapSpec&, const BootstrapSpec&) = default;
};

struct TesSpec {
  TesParams params;
  int n_max = 4;
  long long trials = 1000000;
  friend bool operator==(const TesSpec&, const TesSpec&) = default;
};

struct RunConfig {
  std::string preset = "paper_default";
  Scenario scenario = Scenario::Herald;
  ExperimentParams experiment;
  std::vector<int> herald_ns{0, 1, 2, 3, 4};
  CatSpec cat;
  PhasePlan plan;
  MleConfig mle;
  GridSpec quad_grid{-6.0, 6.0, 241};
  GridSpec wigner_grid{-5.0, 5.0, 201};
  double marginal_step_deg = 1.0;
  BootstrapSpec bootstrap;
  TesSpec tes;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "catsim_out";

  /// Throws ConfigError naming the offending key.
  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
RunConfig preset(std::string_view name);

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
/// Every key, in a fixed order; parse_config(serialize_config(c)) == c.
/// Without the output directory the text describes the run independently of
/// where its files are written.
std::string serialize_config(const RunConfig& config, bool with_output_dir = true);
/// SHA-256 of serialize_config without the output directory, hex encoded.
std::string config_hash(const RunConfig& config);

}  // namespace catsim
