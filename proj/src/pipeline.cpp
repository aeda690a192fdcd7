#include "catsim/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "catsim/channels.hpp"
#include "catsim/io.hpp"
#include "catsim/random.hpp"
#include "json.hpp"

#ifndef CATSIM_VERSION
#define CATSIM_VERSION "dev"
#endif

namespace catsim {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kStatesFile = "states.json";
constexpr const char* kAnalysisFile = "analysis.json";

// Writes the files of one stage and records them in the manifest.
class StageWriter {
 public:
  StageWriter(const RunConfig& config, Stage stage)
      : dir_(config.output_dir), stage_(stage_name(stage)), start_(std::chrono::steady_clock::now()) {
    const std::string hash = config_hash(config);
    if (fs::exists(dir_ / kManifestFile)) {
      manifest_ = load_manifest(dir_);
      if (manifest_.config_hash != hash) {
        if (stage != Stage::Simulate) {
          throw ConfigError("run directory " + dir_.string() +
                            " was produced with a different configuration");
        }
        manifest_ = {};
      }
    }
    manifest_.config_hash = hash;
    manifest_.version = CATSIM_VERSION;
    std::erase_if(manifest_.files, [&](const ManifestEntry& e) { return e.stage == stage_; });
  }

  void write(const std::string& relative, std::string_view contents) {
    write_text_file(dir_ / relative, contents);
    manifest_.files.push_back({relative, sha256_hex(contents), stage_});
  }

  void finish() {
    std::sort(manifest_.files.begin(), manifest_.files.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    manifest_.timings_s[stage_] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json j;
    j["config_hash"] = manifest_.config_hash;
    j["version"] = manifest_.version;
    j["files"] = json::array();
    for (const auto& f : manifest_.files) {
      j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"stage", f.stage}});
    }
    j["timings_s"] = manifest_.timings_s;
    write_text_file(dir_ / kManifestFile, j.dump(2) + "\n");
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
  RunManifest manifest_;
};

void require(const fs::path& path, Stage producer) {
  if (!fs::exists(path)) {
    throw MissingInputError(path.string() + " is missing; run the " +
                            std::string(stage_name(producer)) + " stage first");
  }
}

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"sigma", e.sigma}}; }

json coherence_json(const CoherenceProbe& c) {
  return {{"peak_position", c.peak_position}, {"diagonal", c.diagonal}, {"off_diagonal", c.off_diagonal}};
}

struct NamedState {
  std::string id;
  DensityMatrix rho;
  std::optional<int> herald_n;
  double herald_probability = 0.0;
  double rate_cps = 0.0;
  bool tomography = true;
};

std::vector<NamedState> build_states(const RunConfig& config, std::vector<CountRate>& rates) {
  const HilbertConfig hilbert(config.experiment.cutoff);
  std::vector<NamedState> states;
  if (config.scenario == Scenario::Cats) {
    const Complex alpha = config.cat.alpha;
    const DensityMatrix even = DensityMatrix::from_state(cat_state(alpha, CatParity::Even, hilbert));
    states.push_back({"cat_even", even, {}, 0.0, 0.0, true});
    states.push_back({"cat_odd", DensityMatrix::from_state(cat_state(alpha, CatParity::Odd, hilbert)),
                      {}, 0.0, 0.0, true});
    states.push_back({"cat_even_lossy", loss_channel(even, 1.0 - config.cat.loss), {}, 0.0, 0.0, true});
    states.push_back({"mixture", mixed_coherent(alpha, hilbert), {}, 0.0, 0.0, true});
    return states;
  }
  const HeraldingModel model(config.experiment, hilbert);
  states.push_back({"input", model.input_state(), {}, 0.0, 0.0, false});
  std::vector<int> ns = config.herald_ns;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  for (int n : ns) {
    HeraldResult r = model.branch(n);
    states.push_back({"herald_" + std::to_string(n), std::move(r.state), n, r.herald_probability,
                      r.estimated_rate, true});
  }
  for (int n = 0; n <= ns.back(); ++n) {
    const double p = model.unnormalized_branch(n).trace().real();
    rates.push_back({n, p, p * config.experiment.rep_rate_hz * config.experiment.duty_cycle});
  }
  return states;
}

std::string photon_distribution_csv(const DensityMatrix& rho) {
  std::ostringstream out;
  out << "n,p\n";
  const RVector p = photon_distribution(rho);
  for (Eigen::Index n = 0; n < p.size(); ++n) out << n << ',' << format_double(p(n)) << '\n';
  return out.str();
}

std::string wigner_cut_csv(const DensityMatrix& rho, const QuadAxis& x_axis) {
  std::ostringstream out;
  out << "# basis=wigner p=0\nx,W\n";
  for (Eigen::Index i = 0; i < x_axis.size(); ++i) {
    out << format_double(x_axis[i]) << ',' << format_double(wigner_at(rho, x_axis[i], 0.0)) << '\n';
  }
  return out.str();
}

std::string marginals_csv(const DensityMatrix& rho, const QuadAxis& axis, double step_deg) {
  std::vector<Angle> thetas;
  const int steps = int(std::floor(180.0 / step_deg + 1e-9));
  for (int k = 0; k <= steps; ++k) thetas.push_back(Angle::degrees(-90.0 + k * step_deg));
  const RMatrix m = marginal_sweep(rho, thetas, axis);
  std::ostringstream out;
  out << "theta_deg,q,P\n";
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const std::string theta = format_double(-90.0 + double(k) * step_deg);
    for (Eigen::Index i = 0; i < axis.size(); ++i) {
      out << theta << ',' << format_double(axis[i]) << ',' << format_double(m(Eigen::Index(k), i)) << '\n';
    }
  }
  return out.str();
}

StateSummary summary_from_json(const json& j) {
  StateSummary s;
  s.id = j.at("id").get<std::string>();
  if (j.contains("herald_n")) s.herald_n = j.at("herald_n").get<int>();
  s.herald_probability = j.at("herald_probability").get<double>();
  s.rate_cps = j.at("rate_cps").get<double>();
  s.mean_photon = j.at("mean_photon").get<double>();
  s.purity = j.at("purity").get<double>();
  s.odd_weight = j.at("odd_weight").get<double>();
  s.wigner_origin = j.at("wigner_origin").get<double>();
  s.wigner_min = j.at("wigner_min").get<double>();
  const auto& c = j.at("coherence");
  s.coherence = {c.at("peak_position").get<double>(), c.at("diagonal").get<double>(),
                 c.at("off_diagonal").get<double>()};
  return s;
}

std::vector<std::string> subdirectories(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::Simulate: return "simulate";
    case Stage::Sample: return "sample";
    case Stage::Reconstruct: return "reconstruct";
    case Stage::Analyze: return "analyze";
    case Stage::Report: return "report";
  }
  return "unknown";
}

std::vector<std::string> RunManifest::verify(const fs::path& run_dir) const {
  std::vector<std::string> problems;
  for (const auto& f : files) {
    const fs::path path = run_dir / f.path;
    if (!fs::exists(path)) {
      problems.push_back(f.path + ": missing");
    } else if (sha256_hex(read_text_file(path)) != f.sha256) {
      problems.push_back(f.path + ": checksum mismatch");
    }
  }
  return problems;
}

RunManifest load_manifest(const fs::path& run_dir) {
  const json j = parse_json_file(run_dir / kManifestFile);
  RunManifest m;
  try {
    m.config_hash = j.at("config_hash").get<std::string>();
    m.version = j.at("version").get<std::string>();
    for (const auto& f : j.at("files")) {
      m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                         f.at("stage").get<std::string>()});
    }
    m.timings_s = j.at("timings_s").get<std::map<std::string, double>>();
  } catch (const json::exception& e) {
    throw SchemaError("manifest: " + std::string(e.what()));
  }
  return m;
}

bool ReportSummary::all_passed() const {
  return integrity_problems.empty() &&
         std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

void run_simulate(const RunConfig& config) {
  config.validate();
  StageWriter out(config, Stage::Simulate);
  out.write("run.cfg", serialize_config(config, false));

  std::vector<CountRate> rates;
  const std::vector<NamedState> states = build_states(config, rates);
  const QuadAxis quad = config.quad_grid.axis();
  const QuadAxis wx = config.wigner_grid.axis();

  json listing = json::array();
  for (const auto& s : states) {
    const std::string base = "states/" + s.id + "/";
    const WignerGrid w = wigner(s.rho, wx, wx);
    StateSummary summary = summarize_state(s.id, s.rho, quad, w);
    out.write(base + "rho.json", density_matrix_to_json(s.rho));
    out.write(base + "photon_distribution.csv", photon_distribution_csv(s.rho));
    for (const auto& [name, deg] : {std::pair{"x", 0.0}, std::pair{"p", 90.0}}) {
      std::ostringstream csv;
      write_quad_csv(csv, rho_quad(s.rho, Angle::degrees(deg), quad), name);
      out.write(base + "rho_" + name + ".csv", csv.str());
    }
    std::ostringstream wcsv;
    write_wigner_csv(wcsv, w);
    out.write(base + "wigner.csv", wcsv.str());
    out.write(base + "wigner_cut_p0.csv", wigner_cut_csv(s.rho, wx));
    out.write(base + "marginals.csv", marginals_csv(s.rho, quad, config.marginal_step_deg));

    json j = {{"id", s.id},
              {"tomography", s.tomography},
              {"herald_probability", s.herald_probability},
              {"rate_cps", s.rate_cps},
              {"mean_photon", summary.mean_photon},
              {"purity", summary.purity},
              {"odd_weight", summary.odd_weight},
              {"wigner_origin", summary.wigner_origin},
              {"wigner_min", summary.wigner_min},
              {"coherence", coherence_json(summary.coherence)}};
    if (s.herald_n) j["herald_n"] = *s.herald_n;
    listing.push_back(std::move(j));
  }

  json rate_rows = json::array();
  if (!rates.empty()) {
    std::ostringstream csv;
    csv << "n,probability,rate_cps\n";
    for (const auto& r : rates) {
      csv << r.n << ',' << format_double(r.probability) << ',' << format_double(r.rate_cps) << '\n';
      rate_rows.push_back({{"n", r.n}, {"probability", r.probability}, {"rate_cps", r.rate_cps}});
    }
    out.write("rates.csv", csv.str());
  }
  out.write(kStatesFile,
            json{{"scenario", config.scenario == Scenario::Herald ? "herald" : "cats"},
                 {"states", listing},
                 {"count_rates", rate_rows}}
                    .dump(2) + "\n");

  const ConfusionMatrix mc = confusion(config.tes.params, config.tes.n_max, config.tes.trials,
                                       derive_seed(config.seed, {1}));
  std::ostringstream mc_csv;
  write_confusion_csv(mc_csv, mc);
  out.write("tes/confusion.csv", mc_csv.str());
  std::ostringstream an_csv;
  write_confusion_csv(an_csv, confusion_analytic(config.tes.params, config.tes.n_max));
  out.write("tes/confusion_analytic.csv", an_csv.str());
  out.finish();
}

void run_sample(const RunConfig& config) {
  config.validate();
  require(config.output_dir / kStatesFile, Stage::Simulate);
  StageWriter out(config, Stage::Sample);
  const json listing = parse_json_file(config.output_dir / kStatesFile);
  std::uint64_t index = 0;
  for (const auto& s : listing.at("states")) {
    const std::string id = s.at("id").get<std::string>();
    ++index;
    if (!s.at("tomography").get<bool>()) continue;
    const fs::path rho_path = config.output_dir / "states" / id / "rho.json";
    require(rho_path, Stage::Simulate);
    const HomodyneDataset ds =
        synth_dataset(load_density_matrix(rho_path), config.plan, derive_seed(config.seed, {2, index}), id);
    std::ostringstream csv;
    write_dataset(csv, ds);
    out.write("datasets/" + id + ".csv", csv.str());
  }
  out.finish();
}

void run_reconstruct(const RunConfig& config) {
  config.validate();
  const fs::path data_dir = config.output_dir / "datasets";
  require(data_dir, Stage::Sample);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(data_dir)) {
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw MissingInputError(data_dir.string() + " holds no datasets; run the sample stage first");

  StageWriter out(config, Stage::Reconstruct);
  MleConfig boot_cfg = config.mle;
  boot_cfg.bin_width = config.bootstrap.bin_width;
  std::uint64_t index = 0;
  for (const auto& path : files) {
    ++index;
    const std::string id = path.stem().string();
    const std::string base = "reconstructed/" + id + "/";
    const HomodyneDataset ds = load_dataset(path);
    const MleResult result = mle_reconstruct(ds, config.mle);
    const auto& d = result.diagnostics;
    out.write(base + "rho.json", density_matrix_to_json(result.rho));
    out.write(base + "diagnostics.json",
              json{{"iterations", d.iterations},
                   {"final_log_likelihood", d.final_log_likelihood},
                   {"converged", d.converged},
                   {"diluted_steps", d.diluted_steps},
                   {"psd_clipped", d.psd_clipped},
                   {"warnings", d.warnings},
                   {"log_likelihood_monotone", log_likelihood_monotone(d.log_likelihood_trace)},
                   {"log_likelihood_trace", d.log_likelihood_trace}}
                      .dump(2) + "\n");
    if (config.bootstrap.replicas > 0) {
      const BootstrapReport b =
          bootstrap(ds, boot_cfg, config.bootstrap.replicas, derive_seed(config.seed, {3, index}));
      json pn = json::array();
      for (const auto& e : b.photon_distribution) pn.push_back(estimate_json(e));
      out.write(base + "bootstrap.json",
                json{{"replicas", b.replicas},
                     {"succeeded", b.succeeded},
                     {"failures", b.failures},
                     {"bin_width", boot_cfg.bin_width ? json(*boot_cfg.bin_width) : json(nullptr)},
                     {"photon_distribution", pn},
                     {"mean_photon", estimate_json(b.mean_photon)},
                     {"wigner_origin", estimate_json(b.wigner_origin)},
                     {"peak_off_diagonal", estimate_json(b.peak_off_diagonal)}}
                        .dump(2) + "\n");
    }
  }
  out.finish();
}

void run_analyze(const RunConfig& config) {
  config.validate();
  const fs::path rec_dir = config.output_dir / "reconstructed";
  require(rec_dir, Stage::Reconstruct);
  require(config.output_dir / kStatesFile, Stage::Simulate);
  const QuadAxis quad = config.quad_grid.axis();
  StageWriter out(config, Stage::Analyze);

  json rows = json::array();
  for (const auto& id : subdirectories(rec_dir)) {
    const fs::path sim_path = config.output_dir / "states" / id / "rho.json";
    require(sim_path, Stage::Simulate);
    require(rec_dir / id / "rho.json", Stage::Reconstruct);
    const DensityMatrix sim = load_density_matrix(sim_path);
    const DensityMatrix rec = load_density_matrix(rec_dir / id / "rho.json");
    const json diag = parse_json_file(rec_dir / id / "diagnostics.json");
    json row = {{"id", id},
                {"fidelity", fidelity(with_cutoff(rec, sim.cutoff()), sim)},
                {"reconstructed",
                 {{"mean_photon", mean_photon(rec)},
                  {"wigner_origin", origin_parity(rec)},
                  {"peak_off_diagonal", coherence_at_peak(rec, quad).off_diagonal}}},
                {"simulated",
                 {{"mean_photon", mean_photon(sim)},
                  {"wigner_origin", origin_parity(sim)},
                  {"peak_off_diagonal", coherence_at_peak(sim, quad).off_diagonal}}},
                {"log_likelihood_monotone", diag.at("log_likelihood_monotone")},
                {"converged", diag.at("converged")},
                {"warnings", diag.at("warnings")}};
    const fs::path boot_path = rec_dir / id / "bootstrap.json";
    if (fs::exists(boot_path)) {
      const json b = parse_json_file(boot_path);
      row["bootstrap"] = {{"replicas", b.at("replicas")},
                          {"succeeded", b.at("succeeded")},
                          {"mean_photon", b.at("mean_photon")},
                          {"wigner_origin", b.at("wigner_origin")},
                          {"peak_off_diagonal", b.at("peak_off_diagonal")}};
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw MissingInputError(rec_dir.string() + " is empty; run the reconstruct stage first");
  const json states = parse_json_file(config.output_dir / kStatesFile);
  out.write(kAnalysisFile, json{{"states", rows}, {"count_rates", states.at("count_rates")}}.dump(2) + "\n");
  out.finish();
}

ReportSummary run_report(const RunConfig& config) {
  config.validate();
  require(config.output_dir / kAnalysisFile, Stage::Analyze);
  require(config.output_dir / kManifestFile, Stage::Simulate);
  ReportSummary summary;
  summary.integrity_problems = load_manifest(config.output_dir).verify(config.output_dir);
  StageWriter out(config, Stage::Report);

  const json state_listing = parse_json_file(config.output_dir / kStatesFile);
  const json analysis = parse_json_file(config.output_dir / kAnalysisFile);
  std::vector<StateSummary> states;
  for (const auto& s : state_listing.at("states")) {
    states.push_back(summary_from_json(s));
  }
  std::vector<ReconstructionSummary> recons;
  for (const auto& r : analysis.at("states")) {
    ReconstructionSummary rs;
    rs.id = r.at("id").get<std::string>();
    rs.fidelity = r.at("fidelity").get<double>();
    rs.wigner_origin = r.at("reconstructed").at("wigner_origin").get<double>();
    rs.simulated_wigner_origin = r.at("simulated").at("wigner_origin").get<double>();
    rs.log_likelihood_monotone = r.at("log_likelihood_monotone").get<bool>();
    if (r.contains("bootstrap")) {
      const auto& w = r.at("bootstrap").at("wigner_origin");
      rs.bootstrap_wigner_origin = Estimate{w.at("mean").get<double>(), w.at("sigma").get<double>()};
    }
    for (const auto& w : r.at("warnings")) summary.warnings.push_back(rs.id + ": " + w.get<std::string>());
    recons.push_back(std::move(rs));
  }

  summary.checks = {check_parity_pattern(states),  check_mean_photon(states),
                    check_count_rates(states),     check_coherence(states),
                    check_cat_panels(states),      check_closed_loop(recons),
                    check_bootstrap(recons),       check_wigner_oracle(config.seed),
                    check_channel_algebra(),       check_tes_discrimination(config.tes, config.seed)};

  json checks = json::array();
  std::ostringstream text;
  text << "criterion  status   title\n";
  for (const auto& c : summary.checks) {
    checks.push_back({{"id", c.id}, {"title", c.title}, {"status", to_string(c.status)}, {"detail", c.detail}});
    std::string status(to_string(c.status));
    status.resize(8, ' ');
    text << (c.id < 10 ? " " : "") << c.id << "         " << status << " " << c.title << "\n"
         << "           " << c.detail << "\n";
  }
  text << "\nintegrity: "
       << (summary.integrity_problems.empty() ? "all checksums match" : "checksum problems") << "\n";
  for (const auto& p : summary.integrity_problems) text << "  " << p << "\n";
  if (!summary.warnings.empty()) text << "\nwarnings:\n";
  for (const auto& w : summary.warnings) text << "  " << w << "\n";
  text << "\noverall: " << (summary.all_passed() ? "pass" : "FAIL") << "\n";

  out.write("report.json", json{{"config_hash", config_hash(config)},
                                {"checks", checks},
                                {"integrity_problems", summary.integrity_problems},
                                {"warnings", summary.warnings},
                                {"passed", summary.all_passed()}}
                               .dump(2) + "\n");
  out.write("report.txt", text.str());
  out.finish();
  return summary;
}

}  // namespace catsim
