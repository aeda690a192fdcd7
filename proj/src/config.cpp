#include "catsim/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "catsim/io.hpp"

namespace catsim {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> items;
  while (true) {
    const auto comma = value.find(',');
    items.push_back(trim(value.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return items;
}

double to_double(std::string_view key, std::string_view token) {
  double v = 0.0;
  if (!parse_double(token, v)) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(token) + "'");
  }
  return v;
}

template <typename Int>
Int to_integer(std::string_view key, std::string_view token) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(token) + "'");
  }
  return v;
}

std::optional<double> to_optional_width(std::string_view key, std::string_view token) {
  if (token == "none") return std::nullopt;
  return to_double(key, token);
}

GridSpec to_grid(std::string_view key, std::string_view value) {
  const auto items = split_list(value);
  if (items.size() != 3) throw ConfigError(std::string(key) + ": expected min,max,count");
  return {to_double(key, items[0]), to_double(key, items[1]), to_integer<int>(key, items[2])};
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

std::string grid_string(const GridSpec& g) {
  return format_double(g.min) + ',' + format_double(g.max) + ',' + std::to_string(g.count);
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"scenario",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         if (v == "herald") c.scenario = Scenario::Herald;
         else if (v == "cats") c.scenario = Scenario::Cats;
         else throw ConfigError(std::string(k) + ": expected herald or cats");
       }},
      {"squeeze_db",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.experiment.squeeze = SqueezeSpec::from_db(to_double(k, v));
       }},
      {"squeeze_r",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.experiment.squeeze = SqueezeSpec::from_r(to_double(k, v));
       }},
      {"opa_loss", [](RunConfig& c, std::string_view k, std::string_view v) { c.experiment.opa_loss = to_double(k, v); }},
      {"bs_reflectivity", [](RunConfig& c, std::string_view k, std::string_view v) { c.experiment.bs_reflectivity = to_double(k, v); }},
      {"idler_efficiency", [](RunConfig& c, std::string_view k, std::string_view v) { c.experiment.idler_efficiency = to_double(k, v); }},
      {"signal_efficiency", [](RunConfig& c, std::string_view k, std::string_view v) { c.experiment.signal_efficiency = to_double(k, v); }},
      {"herald_n", [](RunConfig& c, std::string_view k, std::string_view v) { c.experiment.herald_n = to_integer<int>(k, v); }},
      {"rep_rate_hz", [](RunConfig& c, std::string_view k, std::string_view v) { c.experiment.rep_rate_hz = to_double(k, v); }},
      {"duty_cycle", [](RunConfig& c, std::string_view k, std::string_view v) { c.experiment.duty_cycle = to_double(k, v); }},
      {"cutoff", [](RunConfig& c, std::string_view k, std::string_view v) { c.experiment.cutoff = to_integer<int>(k, v); }},
      {"idler_cutoff", [](RunConfig& c, std::string_view k, std::string_view v) { c.experiment.idler_cutoff = to_integer<int>(k, v); }},
      {"herald_ns",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.herald_ns.clear();
         for (auto item : split_list(v)) c.herald_ns.push_back(to_integer<int>(k, item));
       }},
      {"seed", [](RunConfig& c, std::string_view k, std::string_view v) { c.seed = to_integer<std::uint64_t>(k, v); }},
      {"output_dir", [](RunConfig& c, std::string_view, std::string_view v) { c.output_dir = std::string(v); }},
      {"cat.alpha_re", [](RunConfig& c, std::string_view k, std::string_view v) { c.cat.alpha.real(to_double(k, v)); }},
      {"cat.alpha_im", [](RunConfig& c, std::string_view k, std::string_view v) { c.cat.alpha.imag(to_double(k, v)); }},
      {"cat.loss", [](RunConfig& c, std::string_view k, std::string_view v) { c.cat.loss = to_double(k, v); }},
      {"plan.phases_deg",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.plan.phases_deg.clear();
         for (auto item : split_list(v)) c.plan.phases_deg.push_back(to_double(k, item));
       }},
      {"plan.samples_per_phase", [](RunConfig& c, std::string_view k, std::string_view v) { c.plan.samples_per_phase = to_integer<int>(k, v); }},
      {"mle.cutoff", [](RunConfig& c, std::string_view k, std::string_view v) { c.mle.cutoff = to_integer<int>(k, v); }},
      {"mle.max_iterations", [](RunConfig& c, std::string_view k, std::string_view v) { c.mle.max_iterations = to_integer<int>(k, v); }},
      {"mle.tolerance", [](RunConfig& c, std::string_view k, std::string_view v) { c.mle.log_likelihood_tolerance = to_double(k, v); }},
      {"mle.bin_width", [](RunConfig& c, std::string_view k, std::string_view v) { c.mle.bin_width = to_optional_width(k, v); }},
      {"grid.quad", [](RunConfig& c, std::string_view k, std::string_view v) { c.quad_grid = to_grid(k, v); }},
      {"grid.wigner", [](RunConfig& c, std::string_view k, std::string_view v) { c.wigner_grid = to_grid(k, v); }},
      {"grid.marginal_step_deg", [](RunConfig& c, std::string_view k, std::string_view v) { c.marginal_step_deg = to_double(k, v); }},
      {"bootstrap.replicas", [](RunConfig& c, std::string_view k, std::string_view v) { c.bootstrap.replicas = to_integer<int>(k, v); }},
      {"bootstrap.bin_width", [](RunConfig& c, std::string_view k, std::string_view v) { c.bootstrap.bin_width = to_optional_width(k, v); }},
      {"tes.photon_energy_ev", [](RunConfig& c, std::string_view k, std::string_view v) { c.tes.params.photon_energy_ev = to_double(k, v); }},
      {"tes.energy_resolution_ev", [](RunConfig& c, std::string_view k, std::string_view v) { c.tes.params.energy_resolution_ev = to_double(k, v); }},
      {"tes.decay_tau_ns", [](RunConfig& c, std::string_view k, std::string_view v) { c.tes.params.decay_tau_ns = to_double(k, v); }},
      {"tes.rise_tau_ns", [](RunConfig& c, std::string_view k, std::string_view v) { c.tes.params.rise_tau_ns = to_double(k, v); }},
      {"tes.noise_floor", [](RunConfig& c, std::string_view k, std::string_view v) { c.tes.params.noise_floor = to_double(k, v); }},
      {"tes.convention",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         if (v == "fwhm") c.tes.params.convention = ResolutionConvention::Fwhm;
         else if (v == "sigma") c.tes.params.convention = ResolutionConvention::Sigma;
         else throw ConfigError(std::string(k) + ": expected fwhm or sigma");
       }},
      {"tes.n_max", [](RunConfig& c, std::string_view k, std::string_view v) { c.tes.n_max = to_integer<int>(k, v); }},
      {"tes.trials", [](RunConfig& c, std::string_view k, std::string_view v) { c.tes.trials = to_integer<long long>(k, v); }},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  auto wrap = [](const char* block, auto&& check) {
    try {
      check();
    } catch (const Error& e) {
      throw ConfigError(std::string(block) + ": " + e.what());
    }
  };
  wrap("experiment", [&] { experiment.validate(); });
  wrap("plan", [&] { plan.validate(); });
  wrap("mle", [&] { mle.validate(); });
  wrap("tes", [&] { tes.params.validate(); });
  wrap("grid.quad", [&] { (void)quad_grid.axis(); });
  wrap("grid.wigner", [&] { (void)wigner_grid.axis(); });
  if (herald_ns.empty()) throw ConfigError("herald_ns: at least one herald number required");
  for (int n : herald_ns) {
    if (n < 0 || n > experiment.idler_cutoff) throw ConfigError("herald_ns: value outside 0..idler_cutoff");
  }
  if (!(cat.loss >= 0.0 && cat.loss < 1.0)) throw ConfigError("cat.loss must lie in [0, 1)");
  if (cat.alpha == Complex(0.0)) throw ConfigError("cat.alpha must be non-zero");
  if (!(marginal_step_deg > 0.0 && marginal_step_deg <= 90.0)) {
    throw ConfigError("grid.marginal_step_deg must lie in (0, 90]");
  }
  if (bootstrap.replicas != 0 && bootstrap.replicas < 2) {
    throw ConfigError("bootstrap.replicas must be 0 or at least 2");
  }
  if (bootstrap.bin_width && !(*bootstrap.bin_width > 0.0)) {
    throw ConfigError("bootstrap.bin_width must be > 0");
  }
  if (tes.n_max < 1) throw ConfigError("tes.n_max must be >= 1");
  if (tes.trials < 1000) throw ConfigError("tes.trials must be >= 1000");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

std::vector<std::string> preset_names() { return {"paper_default", "fig1", "fig2", "lossless"}; }

RunConfig preset(std::string_view name) {
  RunConfig c;
  c.preset = std::string(name);
  if (name == "paper_default") return c;
  if (name == "lossless") {
    c.experiment = ExperimentParams::lossless();
    return c;
  }
  if (name == "fig2") {
    c.experiment = ExperimentParams::lossless();
    c.experiment.squeeze = SqueezeSpec::from_r(0.576);
    c.herald_ns = {4};
    return c;
  }
  if (name == "fig1") {
    c.scenario = Scenario::Cats;
    return c;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

RunConfig parse_config(std::string_view text) {
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line;
  };
  std::vector<Entry> entries;
  std::string preset_name = "paper_default";
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t, std::less<>> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (auto [it, fresh] = seen.emplace(key, line_no); !fresh) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    if (key == "preset") {
      preset_name = value;
    } else if (!setters().contains(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    } else {
      entries.push_back({key, value, line_no});
    }
  }
  if (seen.contains("squeeze_db") && seen.contains("squeeze_r")) {
    throw ConfigError("squeeze_db and squeeze_r are mutually exclusive");
  }

  RunConfig config = preset(preset_name);
  for (const auto& e : entries) {
    try {
      setters().find(e.key)->second(config, e.key, e.value);
    } catch (const Error& err) {
      throw ConfigError("line " + std::to_string(e.line) + ": " + err.what());
    }
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  try {
    return parse_config(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string serialize_config(const RunConfig& c, bool with_output_dir) {
  const auto& x = c.experiment;
  std::ostringstream out;
  out << "preset = " << c.preset << '\n';
  out << "scenario = " << (c.scenario == Scenario::Herald ? "herald" : "cats") << '\n';
  if (x.squeeze.specified_in_db()) {
    out << "squeeze_db = " << format_double(x.squeeze.db()) << '\n';
  } else {
    out << "squeeze_r = " << format_double(x.squeeze.r()) << '\n';
  }
  out << "opa_loss = " << format_double(x.opa_loss) << '\n'
      << "bs_reflectivity = " << format_double(x.bs_reflectivity) << '\n'
      << "idler_efficiency = " << format_double(x.idler_efficiency) << '\n'
      << "signal_efficiency = " << format_double(x.signal_efficiency) << '\n'
      << "herald_n = " << x.herald_n << '\n'
      << "rep_rate_hz = " << format_double(x.rep_rate_hz) << '\n'
      << "duty_cycle = " << format_double(x.duty_cycle) << '\n'
      << "cutoff = " << x.cutoff << '\n'
      << "idler_cutoff = " << x.idler_cutoff << '\n';
  out << "herald_ns = ";
  for (std::size_t i = 0; i < c.herald_ns.size(); ++i) out << (i ? "," : "") << c.herald_ns[i];
  out << '\n';
  out << "seed = " << c.seed << '\n';
  if (with_output_dir) out << "output_dir = " << c.output_dir.string() << '\n';
  out << "cat.alpha_re = " << format_double(c.cat.alpha.real()) << '\n'
      << "cat.alpha_im = " << format_double(c.cat.alpha.imag()) << '\n'
      << "cat.loss = " << format_double(c.cat.loss) << '\n';
  out << "plan.phases_deg = " << join_doubles(c.plan.phases_deg) << '\n'
      << "plan.samples_per_phase = " << c.plan.samples_per_phase << '\n';
  out << "mle.cutoff = " << c.mle.cutoff << '\n'
      << "mle.max_iterations = " << c.mle.max_iterations << '\n'
      << "mle.tolerance = " << format_double(c.mle.log_likelihood_tolerance) << '\n'
      << "mle.bin_width = " << (c.mle.bin_width ? format_double(*c.mle.bin_width) : "none") << '\n';
  out << "grid.quad = " << grid_string(c.quad_grid) << '\n'
      << "grid.wigner = " << grid_string(c.wigner_grid) << '\n'
      << "grid.marginal_step_deg = " << format_double(c.marginal_step_deg) << '\n';
  out << "bootstrap.replicas = " << c.bootstrap.replicas << '\n'
      << "bootstrap.bin_width = "
      << (c.bootstrap.bin_width ? format_double(*c.bootstrap.bin_width) : "none") << '\n';
  const auto& t = c.tes.params;
  out << "tes.photon_energy_ev = " << format_double(t.photon_energy_ev) << '\n'
      << "tes.energy_resolution_ev = " << format_double(t.energy_resolution_ev) << '\n'
      << "tes.decay_tau_ns = " << format_double(t.decay_tau_ns) << '\n'
      << "tes.rise_tau_ns = " << format_double(t.rise_tau_ns) << '\n'
      << "tes.noise_floor = " << format_double(t.noise_floor) << '\n'
      << "tes.convention = " << (t.convention == ResolutionConvention::Fwhm ? "fwhm" : "sigma") << '\n'
      << "tes.n_max = " << c.tes.n_max << '\n'
      << "tes.trials = " << c.tes.trials << '\n';
  return out.str();
}

std::string config_hash(const RunConfig& config) { return sha256_hex(serialize_config(config, false)); }

}  // namespace catsim
