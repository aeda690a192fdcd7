#pragma once

// The five pipeline stages. Each reads the outputs of the stage before it
// from the run directory and records what it wrote in manifest.json.
//
//   simulate     states/<id>/..., states.json, rates.csv, tes/
//   sample       datasets/<id>.csv
//   reconstruct  reconstructed/<id>/{rho,diagnostics,bootstrap}.json
//   analyze      analysis.json
//   report       report.json, report.txt

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "catsim/checks.hpp"
#include "catsim/config.hpp"

namespace catsim {

enum class Stage { Simulate, Sample, Reconstruct, Analyze, Report };

std::string_view stage_name(Stage stage);

struct ManifestEntry {
  std::string path;  ///< relative to the run directory, '/' separated
  std::string sha256;
  std::string stage;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::vector<ManifestEntry> files;  ///< sorted by path
  std::map<std::string, double> timings_s;

  /// Paths whose file is missing or whose checksum no longer matches.
  std::vector<std::string> verify(const std::filesystem::path& run_dir) const;
};

RunManifest load_manifest(const std::filesystem::path& run_dir);

struct ReportSummary {
  std::vector<CheckResult> checks;
  std::vector<std::string> integrity_problems;
  std::vector<std::string> warnings;  ///< surfaced from reconstruction diagnostics

  bool all_passed() const;
};

void run_simulate(const RunConfig& config);
void run_sample(const RunConfig& config);
void run_reconstruct(const RunConfig& config);
void run_analyze(const RunConfig& config);
ReportSummary run_report(const RunConfig& config);

}  // namespace catsim
