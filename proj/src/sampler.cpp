#include "catsim/sampler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "catsim/io.hpp"
#include "catsim/phase_space.hpp"
#include "catsim/random.hpp"

namespace catsim {

void PhasePlan::validate() const {
  if (phases_deg.empty()) throw DomainError("phase plan needs at least one phase");
  if (samples_per_phase < 1) throw DomainError("samples_per_phase must be >= 1");
  std::set<double> seen;
  for (double t : phases_deg) {
    if (!std::isfinite(t)) throw DomainError("phase plan contains a non-finite phase");
    if (!seen.insert(t).second) throw DomainError("phase plan lists a phase twice");
  }
}

void HomodyneDataset::validate() const {
  std::vector<PhaseCount> observed;
  for (const auto& r : records) {
    if (!std::isfinite(r.theta_deg) || !std::isfinite(r.q)) {
      throw SchemaError("dataset contains a non-finite value");
    }
    auto it = std::find_if(observed.begin(), observed.end(),
                           [&](const PhaseCount& c) { return c.theta_deg == r.theta_deg; });
    if (it == observed.end()) {
      observed.push_back({r.theta_deg, 1});
    } else {
      ++it->count;
    }
  }
  for (const auto& c : observed) {
    auto it = std::find_if(meta.counts.begin(), meta.counts.end(),
                           [&](const PhaseCount& d) { return d.theta_deg == c.theta_deg; });
    if (it == meta.counts.end()) {
      throw SchemaError("phase " + format_double(c.theta_deg) + " is not in the declared phase list");
    }
    if (it->count != c.count) {
      throw SchemaError("phase " + format_double(c.theta_deg) + " declares " +
                        std::to_string(it->count) + " records but has " + std::to_string(c.count));
    }
  }
  for (const auto& d : meta.counts) {
    const bool present = std::any_of(observed.begin(), observed.end(),
                                     [&](const PhaseCount& c) { return c.theta_deg == d.theta_deg; });
    if (!present && d.count != 0) {
      throw SchemaError("phase " + format_double(d.theta_deg) + " declared but has no records");
    }
  }
  if (!(meta.shot_noise_variance > 0.0)) throw SchemaError("shot_noise_variance must be > 0");
}

std::vector<double> HomodyneDataset::phases_deg() const {
  std::vector<double> out;
  for (const auto& c : meta.counts) out.push_back(c.theta_deg);
  return out;
}

double HomodyneDataset::normalization() const { return std::sqrt(0.5 / meta.shot_noise_variance); }

MarginalSampler::MarginalSampler(const DensityMatrix& rho, Angle theta) {
  const double half_width = std::max(6.0, std::sqrt(2.0 * rho.cutoff() + 1.0) + 4.0);
  const QuadAxis axis = QuadAxis::uniform(-half_width, half_width, kInverseCdfPoints);
  q_ = axis.values();
  const RVector density = marginal(rho, theta, axis).cwiseMax(0.0);
  cdf_.resize(density.size());
  cdf_(0) = 0.0;
  const double h = axis.step();
  for (Eigen::Index i = 1; i < density.size(); ++i) {
    cdf_(i) = cdf_(i - 1) + 0.5 * h * (density(i - 1) + density(i));
  }
  mass_ = cdf_(cdf_.size() - 1);
  if (!(mass_ >= kMinimumGridMass)) {
    throw DegenerateDistributionError("marginal carries only " + std::to_string(mass_) +
                                      " probability on the sampling grid");
  }
  cdf_ /= mass_;
}

double MarginalSampler::operator()(double u) const {
  const double* begin = cdf_.data();
  const double* end = begin + cdf_.size();
  const double* it = std::upper_bound(begin, end, u);
  if (it == begin) return q_(0);
  if (it == end) return q_(q_.size() - 1);
  const Eigen::Index i = (it - begin) - 1;
  const double span = cdf_(i + 1) - cdf_(i);
  const double frac = span > 0.0 ? (u - cdf_(i)) / span : 0.0;
  return q_(i) + frac * (q_(i + 1) - q_(i));
}

std::vector<double> sample_phase(const DensityMatrix& rho, Angle theta, std::size_t count,
                                 std::uint64_t seed) {
  if (count < 1) throw DomainError("sample count must be >= 1");
  const MarginalSampler inverse(rho, theta);
  Engine engine(seed);
  std::vector<double> out(count);
  for (auto& q : out) q = inverse(uniform01(engine));
  return out;
}

HomodyneDataset synth_dataset(const DensityMatrix& rho, const PhasePlan& plan, std::uint64_t seed,
                              std::string source) {
  plan.validate();
  HomodyneDataset ds;
  ds.meta.source = std::move(source);
  ds.meta.seed = seed;
  ds.records.reserve(plan.phases_deg.size() * std::size_t(plan.samples_per_phase));
  for (double theta : plan.phases_deg) {
    const auto qs = sample_phase(rho, Angle::degrees(theta), std::size_t(plan.samples_per_phase),
                                 derive_seed(seed, {seed_key(theta)}));
    for (double q : qs) ds.records.push_back({theta, q});
    ds.meta.counts.push_back({theta, qs.size()});
  }
  return ds;
}

void write_dataset(std::ostream& out, const HomodyneDataset& dataset) {
  dataset.validate();
  if (!dataset.meta.source.empty()) out << "#source=" << dataset.meta.source << '\n';
  out << "#seed=" << dataset.meta.seed << '\n';
  out << "#shot_noise_variance=" << format_double(dataset.meta.shot_noise_variance) << '\n';
  out << "#counts=";
  for (std::size_t i = 0; i < dataset.meta.counts.size(); ++i) {
    if (i) out << ';';
    out << format_double(dataset.meta.counts[i].theta_deg) << ':' << dataset.meta.counts[i].count;
  }
  out << '\n';
  out << "theta_deg,q\n";
  for (const auto& r : dataset.records) out << format_double(r.theta_deg) << ',' << format_double(r.q) << '\n';
}

namespace {

std::vector<PhaseCount> parse_counts(std::string_view value, std::size_t line) {
  std::vector<PhaseCount> counts;
  while (!value.empty()) {
    const auto semi = value.find(';');
    const std::string_view item = value.substr(0, semi);
    const auto colon = item.find(':');
    double theta = 0.0;
    double count = 0.0;
    if (colon == std::string_view::npos || !parse_double(item.substr(0, colon), theta) ||
        !parse_double(item.substr(colon + 1), count) || count < 0 || count != std::floor(count)) {
      throw ParseError("malformed counts entry '" + std::string(item) + "'", line);
    }
    counts.push_back({theta, std::size_t(count)});
    if (semi == std::string_view::npos) break;
    value.remove_prefix(semi + 1);
  }
  return counts;
}

}  // namespace

HomodyneDataset read_dataset(std::istream& in) {
  HomodyneDataset ds;
  bool header_seen = false;
  bool counts_declared = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = std::string_view(line).substr(1);
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string_view key = body.substr(0, eq);
      const std::string_view value = body.substr(eq + 1);
      if (key == "source") {
        ds.meta.source = std::string(value);
      } else if (key == "seed") {
        const auto res = std::from_chars(value.data(), value.data() + value.size(), ds.meta.seed);
        if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
          throw ParseError("malformed seed", lineno);
        }
      } else if (key == "shot_noise_variance") {
        if (!parse_double(value, ds.meta.shot_noise_variance)) {
          throw ParseError("malformed shot_noise_variance", lineno);
        }
      } else if (key == "counts") {
        ds.meta.counts = parse_counts(value, lineno);
        counts_declared = true;
      }
      continue;
    }
    if (!header_seen) {
      if (line != "theta_deg,q") throw SchemaError("expected header 'theta_deg,q', got '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError("expected two comma-separated fields", lineno);
    }
    HomodyneRecord r{};
    if (!parse_double(std::string_view(line).substr(0, comma), r.theta_deg) ||
        !std::isfinite(r.theta_deg)) {
      throw ParseError("malformed theta_deg '" + line.substr(0, comma) + "'", lineno);
    }
    if (!parse_double(std::string_view(line).substr(comma + 1), r.q) || !std::isfinite(r.q)) {
      throw ParseError("malformed q '" + line.substr(comma + 1) + "'", lineno);
    }
    ds.records.push_back(r);
  }
  if (!header_seen) throw SchemaError("dataset has no 'theta_deg,q' header");
  if (!counts_declared) {
    for (const auto& r : ds.records) {
      auto it = std::find_if(ds.meta.counts.begin(), ds.meta.counts.end(),
                             [&](const PhaseCount& c) { return c.theta_deg == r.theta_deg; });
      if (it == ds.meta.counts.end()) {
        ds.meta.counts.push_back({r.theta_deg, 1});
      } else {
        ++it->count;
      }
    }
  }
  ds.validate();
  return ds;
}

void save_dataset(const HomodyneDataset& dataset, const std::filesystem::path& path) {
  std::ostringstream ss;
  write_dataset(ss, dataset);
  write_text_file(path, ss.str());
}

HomodyneDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_dataset(in);
}

}  // namespace catsim
