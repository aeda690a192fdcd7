#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "catsim/io.hpp"
#include "catsim/pipeline.hpp"
#include "doctest.h"

using namespace catsim;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSmallConfig =
    "herald_ns = 0,2\n"
    "plan.samples_per_phase = 2000\n"
    "mle.cutoff = 10\n"
    "mle.bin_width = 0.02\n"
    "grid.quad = -6,6,61\n"
    "grid.wigner = -4,4,41\n"
    "grid.marginal_step_deg = 15\n"
    "bootstrap.replicas = 4\n"
    "tes.trials = 10000\n";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("catsim_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  return dir;
}

RunConfig small_config(const fs::path& out, std::string extra = {}) {
  RunConfig c = parse_config(std::string(kSmallConfig) + extra);
  c.output_dir = out;
  return c;
}

ReportSummary run_all(const RunConfig& c) {
  run_simulate(c);
  run_sample(c);
  run_reconstruct(c);
  run_analyze(c);
  return run_report(c);
}

std::string file_text(const fs::path& p) { return read_text_file(p); }

int cli(const std::string& args) {
  const std::string cmd = std::string(CATSIM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("runs are reproducible and tamper evident") {
  const fs::path a = scratch("a"), b = scratch("b");
  const ReportSummary first = run_all(small_config(a));
  run_all(small_config(b));

  CHECK(first.integrity_problems.empty());
  REQUIRE(first.checks.size() == 10);
  const RunManifest ma = load_manifest(a), mb = load_manifest(b);
  CHECK(ma.files == mb.files);
  CHECK(ma.config_hash == mb.config_hash);
  CHECK(file_text(a / "report.json") == file_text(b / "report.json"));
  CHECK(ma.verify(a).empty());

  for (const char* stage : {"simulate", "sample", "reconstruct", "analyze", "report"}) {
    CHECK(std::any_of(ma.files.begin(), ma.files.end(), [&](const ManifestEntry& e) { return e.stage == stage; }));
  }
  CHECK(fs::exists(a / "states" / "herald_2" / "wigner.csv"));
  CHECK(fs::exists(a / "datasets" / "herald_2.csv"));
  CHECK(fs::exists(a / "reconstructed" / "herald_2" / "bootstrap.json"));
  CHECK(fs::exists(a / "tes" / "confusion.csv"));

  {
    std::ofstream out(a / "datasets" / "herald_2.csv", std::ios::app);
    out << "0,0.5\n";
  }
  const auto problems = ma.verify(a);
  REQUIRE(problems.size() == 1);
  CHECK(problems.front().starts_with("datasets/herald_2.csv"));
  fs::remove(a / "states" / "herald_0" / "rho.json");
  CHECK(ma.verify(a).size() == 2);
  CHECK_FALSE(run_report(small_config(a)).all_passed());
}

TEST_CASE("stages need their inputs and nothing more") {
  const fs::path dir = scratch("isolation");
  const RunConfig c = small_config(dir);
  CHECK_THROWS_AS(run_sample(c), MissingInputError);
  CHECK_THROWS_AS(run_reconstruct(c), MissingInputError);
  CHECK_THROWS_AS(run_analyze(c), MissingInputError);

  run_simulate(c);
  run_sample(c);
  fs::remove_all(dir / "states");
  CHECK_NOTHROW(run_reconstruct(c));
  CHECK(fs::exists(dir / "reconstructed" / "herald_0" / "rho.json"));
  CHECK_THROWS_AS(run_analyze(c), MissingInputError);
}

TEST_CASE("a different configuration cannot extend an existing run") {
  const fs::path dir = scratch("mismatch");
  run_simulate(small_config(dir));
  RunConfig other = small_config(dir);
  other.seed = 99;
  CHECK_THROWS_AS(run_sample(other), ConfigError);
}

TEST_CASE("single-phase data surfaces a warning in the report") {
  const fs::path dir = scratch("single");
  const ReportSummary s = run_all(small_config(dir, "plan.phases_deg = 0\n"));
  REQUIRE_FALSE(s.warnings.empty());
  CHECK(s.warnings.front().find("single LO phase") != std::string::npos);
  CHECK(file_text(dir / "report.txt").find("single LO phase") != std::string::npos);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  const auto write = [&](const std::string& name, const std::string& text) {
    write_text_file(dir / name, text);
    return (dir / name).string();
  };
  const std::string good = write("good.cfg", kSmallConfig);
  const std::string bad = write("bad.cfg", "no_such_key = 1\n");
  const std::string tiny = write("tiny.cfg", std::string(kSmallConfig) + "cutoff = 4\n");

  CHECK(cli("config --config " + good) == 0);
  CHECK(cli("config --config " + bad) == 1);
  CHECK(cli("simulate --config " + good + " --preset fig1") == 1);
  CHECK(cli("simulate --config " + tiny + " --out " + (dir / "tiny").string()) == 2);
  CHECK(cli("sample --config " + good + " --out " + (dir / "empty").string()) == 3);
  const std::string run_dir = (dir / "run").string();
  CHECK(cli("run --config " + good + " --out " + run_dir) == 0);
  CHECK(fs::exists(dir / "run" / "report.txt"));
  {
    std::ofstream out(dir / "run" / "rates.csv", std::ios::app);
    out << "tampered\n";
  }
  CHECK(cli("report --config " + good + " --out " + run_dir) == 4);
}
