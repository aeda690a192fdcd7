// catsim: simulate heralded photon subtraction, synthesize homodyne data,
// reconstruct it by maximum likelihood and report on the results.
//
// Exit codes: 0 success, 1 configuration, 2 numerical, 3 input/output,
// 4 report checks failed.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "catsim/config.hpp"
#include "catsim/errors.hpp"
#include "catsim/io.hpp"
#include "catsim/pipeline.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfig = 1, kNumeric = 2, kIo = 3, kChecksFailed = 4 };

struct CommonOptions {
  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  auto* cfg = cmd->add_option("--config", opts.config_path, "run configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--preset", opts.preset_name, "start from a built-in preset")->excludes(cfg);
  cmd->add_option("--out", opts.out_dir, "run directory (overrides output_dir)");
  cmd->add_option("--seed", opts.seed, "master seed (overrides seed)");
}

catsim::RunConfig resolve(const CommonOptions& opts) {
  catsim::RunConfig config = !opts.config_path.empty() ? catsim::load_config(opts.config_path)
                             : !opts.preset_name.empty() ? catsim::preset(opts.preset_name)
                                                         : catsim::RunConfig{};
  if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
  if (opts.seed) config.seed = *opts.seed;
  config.validate();
  return config;
}

int report(const catsim::RunConfig& config) {
  const catsim::ReportSummary summary = catsim::run_report(config);
  std::cout << catsim::read_text_file(config.output_dir / "report.txt");
  return summary.all_passed() ? kOk : kChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heralded photon subtraction and homodyne tomography"};
  app.require_subcommand(1);
  CommonOptions opts;

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"simulate", "simulate the states and write their grids"},
      {"sample", "draw homodyne datasets from the simulated states"},
      {"reconstruct", "maximum-likelihood reconstruction of every dataset"},
      {"analyze", "compare reconstructions with the simulated states"},
      {"report", "evaluate every check and verify file checksums"},
      {"run", "all five stages in order"},
      {"config", "print the resolved configuration"},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help), opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const catsim::RunConfig config = resolve(opts);
    if (name == "config") {
      std::cout << catsim::serialize_config(config);
    } else if (name == "simulate") {
      catsim::run_simulate(config);
    } else if (name == "sample") {
      catsim::run_sample(config);
    } else if (name == "reconstruct") {
      catsim::run_reconstruct(config);
    } else if (name == "analyze") {
      catsim::run_analyze(config);
    } else if (name == "report") {
      return report(config);
    } else {
      catsim::run_simulate(config);
      catsim::run_sample(config);
      catsim::run_reconstruct(config);
      catsim::run_analyze(config);
      return report(config);
    }
    return kOk;
  } catch (const catsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const catsim::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const catsim::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kIo;
  } catch (const catsim::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kIo;
  } catch (const catsim::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  }
}
