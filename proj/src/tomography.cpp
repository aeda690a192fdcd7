#include "catsim/tomography.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "catsim/io.hpp"
#include "catsim/phase_space.hpp"
#include "catsim/random.hpp"
#include "catsim/special.hpp"

namespace catsim {
namespace {

constexpr double kMonotoneTolerance = 1e-9;
constexpr double kPsdFloor = -1e-9;
constexpr int kMaxDilutions = 40;

// Records grouped by LO phase. Each column of `phi` is one distinct projector
// (one record, or one histogram bin) holding psi_n(q) for n = 0..cutoff.
struct PhaseBlock {
  double theta = 0.0;  // radians
  RMatrix phi;
  std::vector<Eigen::Index> record_column;  // column of each record of this phase
  std::vector<std::size_t> record_index;    // position in the dataset
};

class LikelihoodModel {
 public:
  LikelihoodModel(const HomodyneDataset& dataset, int cutoff, std::optional<double> bin_width)
      : dim_(cutoff + 1), total_records_(dataset.records.size()) {
    const double scale = dataset.normalization();
    std::map<double, std::size_t> block_of;
    std::vector<std::vector<double>> centers;
    std::vector<std::map<long long, Eigen::Index>> bin_lookup;
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
      const auto& rec = dataset.records[i];
      auto [it, inserted] = block_of.try_emplace(rec.theta_deg, blocks_.size());
      if (inserted) {
        blocks_.push_back({Angle::degrees(rec.theta_deg).rad(), {}, {}, {}});
        centers.emplace_back();
        bin_lookup.emplace_back();
      }
      const std::size_t b = it->second;
      const double q = rec.q * scale;
      Eigen::Index column;
      if (bin_width) {
        const long long k = std::llround(q / *bin_width);
        auto [bit, fresh] = bin_lookup[b].try_emplace(k, Eigen::Index(centers[b].size()));
        if (fresh) centers[b].push_back(double(k) * *bin_width);
        column = bit->second;
      } else {
        column = Eigen::Index(centers[b].size());
        centers[b].push_back(q);
      }
      blocks_[b].record_column.push_back(column);
      blocks_[b].record_index.push_back(i);
    }
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const RVector q = Eigen::Map<const RVector>(centers[b].data(), Eigen::Index(centers[b].size()));
      blocks_[b].phi = special::hermite_function_table<double>(cutoff, q);
    }
  }

  std::size_t phase_count() const { return blocks_.size(); }
  std::size_t total_records() const { return total_records_; }
  const std::vector<PhaseBlock>& blocks() const { return blocks_; }

  /// Column multiplicities for the full dataset.
  std::vector<RVector> base_weights() const {
    std::vector<RVector> w;
    for (const auto& b : blocks_) {
      RVector wb = RVector::Zero(b.phi.cols());
      for (Eigen::Index c : b.record_column) wb(c) += 1.0;
      w.push_back(std::move(wb));
    }
    return w;
  }

  /// Log-likelihood of rho; when `r_operator` is given also sum_j w_j Pi_j / p_j.
  double evaluate(const CMatrix& rho, const std::vector<RVector>& weights,
                  CMatrix* r_operator) const {
    double ll = 0.0;
    if (r_operator) r_operator->setZero(dim_, dim_);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const PhaseBlock& block = blocks_[b];
      const RVector& w = weights[b];
      const CMatrix rotated = phase_rotation(rho, block.theta);
      const RMatrix sym = rotated.real();
      const RMatrix x = sym * block.phi;
      const RVector p = block.phi.cwiseProduct(x).colwise().sum().transpose();
      RVector scaled(p.size());
      for (Eigen::Index c = 0; c < p.size(); ++c) {
        if (w(c) == 0.0) {
          scaled(c) = 0.0;
          continue;
        }
        if (!(p(c) > 0.0)) throw_singular(b, c);
        ll += w(c) * std::log(p(c));
        scaled(c) = w(c) / p(c);
      }
      if (r_operator) {
        const RMatrix r_block = block.phi * scaled.asDiagonal() * block.phi.transpose();
        *r_operator += phase_rotation(r_block.cast<Complex>(), -block.theta);
      }
    }
    return ll;
  }

 private:
  // (n, m) -> M(n, m) e^{-i(n-m)theta}
  CMatrix phase_rotation(const CMatrix& m, double theta) const {
    CVector d(dim_);
    for (Eigen::Index n = 0; n < dim_; ++n) d(n) = std::polar(1.0, -theta * double(n));
    return d.asDiagonal() * m * d.conjugate().asDiagonal();
  }

  [[noreturn]] void throw_singular(std::size_t b, Eigen::Index column) const {
    const PhaseBlock& block = blocks_[b];
    std::string list;
    int listed = 0;
    for (std::size_t k = 0; k < block.record_column.size(); ++k) {
      if (block.record_column[k] != column) continue;
      if (listed++ < 20) list += (list.empty() ? "" : ", ") + std::to_string(block.record_index[k]);
    }
    throw SingularLikelihoodError("zero probability for records [" + list + "] at theta = " +
                                  format_double(Angle::radians(block.theta).deg()) + " deg");
  }

  Eigen::Index dim_;
  std::size_t total_records_;
  std::vector<PhaseBlock> blocks_;
};

CMatrix hermitize_unit_trace(const CMatrix& m) {
  CMatrix h = (m + m.adjoint()) / 2.0;
  return h / h.trace().real();
}

MleResult run_mle(const LikelihoodModel& model, const std::vector<RVector>& weights,
                  const MleConfig& cfg) {
  const Eigen::Index dim = cfg.cutoff + 1;
  double total_weight = 0.0;
  for (const auto& w : weights) total_weight += w.sum();

  MleDiagnostics diag;
  if (model.phase_count() < 2) {
    diag.warnings.push_back(
        "single LO phase: only the photon-number diagonal is identifiable; off-diagonal elements "
        "are fixed by the phase-insensitive ambiguity of the start point");
  }

  CMatrix rho = CMatrix::Identity(dim, dim) / double(dim);
  CMatrix r_op;
  double ll = model.evaluate(rho, weights, &r_op);
  diag.log_likelihood_trace.push_back(ll);

  for (int it = 0; it < cfg.max_iterations; ++it) {
    CMatrix candidate = hermitize_unit_trace(r_op * rho * r_op);
    CMatrix cand_r;
    double cand_ll = model.evaluate(candidate, weights, &cand_r);
    const double floor = ll - kMonotoneTolerance * std::abs(ll);
    if (cand_ll < floor) {
      // Damped step (I + eps R/N) rho (I + eps R/N) increases the likelihood for small eps.
      ++diag.diluted_steps;
      bool improved = false;
      double eps = 1.0;
      for (int k = 0; k < kMaxDilutions && !improved; ++k, eps *= 0.5) {
        const CMatrix step = CMatrix::Identity(dim, dim) + (eps / total_weight) * r_op;
        candidate = hermitize_unit_trace(step * rho * step.adjoint());
        cand_ll = model.evaluate(candidate, weights, &cand_r);
        improved = cand_ll >= floor;
      }
      if (!improved) {
        diag.warnings.push_back("no likelihood-increasing step found at iteration " +
                                std::to_string(it));
        break;
      }
    }
    const double change = std::abs(cand_ll - ll) / std::max(std::abs(ll), 1e-300);
    rho = std::move(candidate);
    r_op = std::move(cand_r);
    ll = cand_ll;
    diag.iterations = it + 1;
    diag.log_likelihood_trace.push_back(ll);
    if (change < cfg.log_likelihood_tolerance) {
      diag.converged = true;
      break;
    }
  }
  if (!diag.converged) {
    diag.warnings.push_back("NonConvergenceWarning: stopped after " +
                            std::to_string(diag.iterations) +
                            " iterations; returning the last (highest-likelihood) iterate");
  }

  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  if (es.eigenvalues().minCoeff() < kPsdFloor) {
    const RVector clipped = es.eigenvalues().cwiseMax(0.0);
    rho = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
    diag.psd_clipped = true;
  }
  DensityMatrix out = DensityMatrix::normalized(rho);
  diag.final_log_likelihood = ll;
  return {std::move(out), std::move(diag)};
}

struct ReplicaSample {
  RVector diagonal;
  double mean_photon;
  double wigner_origin;
  double off_diagonal;
};

Estimate summarize(const std::vector<double>& v) {
  Estimate e;
  for (double x : v) e.mean += x;
  e.mean /= double(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - e.mean) * (x - e.mean);
  e.sigma = v.size() > 1 ? std::sqrt(ss / double(v.size() - 1)) : 0.0;
  return e;
}

}  // namespace

void MleConfig::validate() const {
  if (cutoff < 1) throw DomainError("MLE cutoff must be >= 1");
  if (max_iterations < 1) throw DomainError("max_iterations must be >= 1");
  if (!(log_likelihood_tolerance > 0.0)) throw DomainError("log_likelihood_tolerance must be > 0");
  if (bin_width && !(*bin_width > 0.0)) throw DomainError("bin width must be > 0");
}

CMatrix povm_projector(Angle theta, double q, int cutoff) {
  if (cutoff < 1) throw DomainError("cutoff must be >= 1");
  const RVector psi = special::hermite_functions<double>(cutoff, q);
  CVector ket(cutoff + 1);  // <n|q_theta>
  for (int n = 0; n <= cutoff; ++n) ket(n) = std::polar(psi(n), theta.rad() * double(n));
  return ket * ket.adjoint();
}

double log_likelihood(const DensityMatrix& rho, const HomodyneDataset& dataset) {
  const LikelihoodModel model(dataset, rho.cutoff(), std::nullopt);
  return model.evaluate(rho.matrix(), model.base_weights(), nullptr);
}

MleResult mle_reconstruct(const HomodyneDataset& dataset, const MleConfig& cfg) {
  cfg.validate();
  if (dataset.records.empty()) throw DomainError("cannot reconstruct from an empty dataset");
  const LikelihoodModel model(dataset, cfg.cutoff, cfg.bin_width);
  return run_mle(model, model.base_weights(), cfg);
}

BootstrapReport bootstrap(const HomodyneDataset& dataset, const MleConfig& cfg, int replicas,
                          std::uint64_t seed, unsigned threads) {
  cfg.validate();
  if (replicas < 2) throw DomainError("bootstrap needs at least 2 replicas");
  if (dataset.records.empty()) throw DomainError("cannot bootstrap an empty dataset");
  const LikelihoodModel model(dataset, cfg.cutoff, cfg.bin_width);
  const QuadAxis axis = default_quad_axis();

  std::vector<std::optional<ReplicaSample>> samples(static_cast<std::size_t>(replicas));
  std::vector<std::string> errors(static_cast<std::size_t>(replicas));
  std::atomic<int> next{0};

  auto worker = [&] {
    for (int r = next++; r < replicas; r = next++) {
      try {
        Engine engine(derive_seed(seed, {std::uint64_t(r)}));
        std::vector<RVector> weights;
        for (const auto& block : model.blocks()) {
          RVector w = RVector::Zero(block.phi.cols());
          const std::size_t n = block.record_column.size();
          for (std::size_t k = 0; k < n; ++k) {
            const auto pick = std::min(n - 1, std::size_t(uniform01(engine) * double(n)));
            w(block.record_column[pick]) += 1.0;
          }
          weights.push_back(std::move(w));
        }
        const MleResult fit = run_mle(model, weights, cfg);
        samples[std::size_t(r)] = ReplicaSample{photon_distribution(fit.rho), mean_photon(fit.rho),
                                                origin_parity(fit.rho),
                                                coherence_at_peak(fit.rho, axis).off_diagonal};
      } catch (const std::exception& e) {
        errors[std::size_t(r)] = e.what();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, unsigned(replicas));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  BootstrapReport report;
  report.replicas = replicas;
  std::vector<double> means, origins, offs;
  std::vector<std::vector<double>> diagonals(std::size_t(cfg.cutoff + 1));
  for (int r = 0; r < replicas; ++r) {
    const auto& s = samples[std::size_t(r)];
    if (!s) {
      report.failures.push_back("replica " + std::to_string(r) + ": " + errors[std::size_t(r)]);
      continue;
    }
    ++report.succeeded;
    means.push_back(s->mean_photon);
    origins.push_back(s->wigner_origin);
    offs.push_back(s->off_diagonal);
    for (Eigen::Index n = 0; n < s->diagonal.size(); ++n) diagonals[std::size_t(n)].push_back(s->diagonal(n));
  }
  if (report.succeeded < kMinimumBootstrapSuccess * replicas || report.succeeded < 2) {
    throw ConvergenceError("only " + std::to_string(report.succeeded) + " of " +
                           std::to_string(replicas) + " bootstrap replicas succeeded");
  }
  report.mean_photon = summarize(means);
  report.wigner_origin = summarize(origins);
  report.peak_off_diagonal = summarize(offs);
  for (const auto& d : diagonals) report.photon_distribution.push_back(summarize(d));
  return report;
}

}  // namespace catsim
