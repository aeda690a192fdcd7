#include "catsim/channels.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

namespace catsim {
namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * double(n - k + j) / double(j);
  return b;
}

// C(n,k) eta^{n-k} (1-eta)^k: probability that k of n photons are lost.
double loss_weight(int n, int k, double eta) {
  return binomial(n, k) * std::pow(eta, n - k) * std::pow(1.0 - eta, k);
}

void require_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

ExperimentParams ExperimentParams::lossless() {
  ExperimentParams p;
  p.opa_loss = 0.0;
  p.idler_efficiency = 1.0;
  p.signal_efficiency = 1.0;
  return p;
}

void ExperimentParams::validate() const {
  require_probability(opa_loss, "opa_loss");
  require_probability(idler_efficiency, "idler_efficiency");
  require_probability(signal_efficiency, "signal_efficiency");
  if (!(bs_reflectivity > 0.0 && bs_reflectivity <= 1.0)) {
    throw DomainError("bs_reflectivity must lie in (0, 1]");
  }
  if (!(duty_cycle > 0.0 && duty_cycle <= 1.0)) throw DomainError("duty_cycle must lie in (0, 1]");
  if (!(rep_rate_hz > 0.0)) throw DomainError("rep_rate_hz must be > 0");
  if (herald_n < 0) throw DomainError("herald_n must be >= 0");
  if (cutoff < 1) throw DomainError("cutoff must be >= 1");
  if (idler_cutoff < 1) throw DomainError("idler_cutoff must be >= 1");
  if (herald_n > idler_cutoff) throw DomainError("herald_n exceeds idler_cutoff");
}

CMatrix loss_channel(const CMatrix& rho, double eta) {
  require_probability(eta, "loss channel transmissivity");
  const Eigen::Index dim = rho.rows();
  // rho'_{a,b} = sum_k sqrt(w(a+k,k) w(b+k,k)) rho_{a+k,b+k}
  RMatrix amp(dim, dim);  // amp(n, k) = sqrt(w(n, k))
  for (Eigen::Index n = 0; n < dim; ++n) {
    for (Eigen::Index k = 0; k < dim; ++k) amp(n, k) = k <= n ? std::sqrt(loss_weight(int(n), int(k), eta)) : 0.0;
  }
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Eigen::Index len = dim - k;
    const RVector a = amp.col(k).tail(len);
    out.topLeftCorner(len, len) += a.asDiagonal() * rho.bottomRightCorner(len, len) * a.asDiagonal();
  }
  return out;
}

DensityMatrix loss_channel(const DensityMatrix& rho, double eta) {
  return DensityMatrix::normalized(loss_channel(rho.matrix(), eta));
}

TwoModeState beamsplitter_join(const StateVector& signal_in, double reflectivity,
                               int idler_cutoff, std::size_t max_elements) {
  if (!(reflectivity > 0.0 && reflectivity <= 1.0)) {
    throw DomainError("beam splitter reflectivity must lie in (0, 1]");
  }
  if (idler_cutoff < 1) throw DomainError("idler_cutoff must be >= 1");
  const Eigen::Index sdim = signal_in.amplitudes().size();
  const Eigen::Index idim = idler_cutoff + 1;
  if (std::size_t(sdim) * std::size_t(idim) > max_elements) {
    throw TruncationBudgetError("two-mode state " + std::to_string(sdim) + " x " +
                                std::to_string(idim) + " exceeds budget of " +
                                std::to_string(max_elements) + " amplitudes");
  }
  // |n>|0> -> sum_k sqrt(C(n,k) R^{n-k} (1-R)^k) |n-k>|k>
  TwoModeState out{CMatrix::Zero(sdim, idim), 0.0};
  double kept = 0.0;
  for (Eigen::Index n = 0; n < sdim; ++n) {
    const Complex c = signal_in[n];
    if (c == Complex(0.0)) continue;
    for (Eigen::Index k = 0; k <= n; ++k) {
      const double w = loss_weight(int(n), int(k), reflectivity);
      if (k < idim) {
        out.amplitudes(n - k, k) += c * std::sqrt(w);
        kept += std::norm(c) * w;
      }
    }
  }
  out.discarded_weight = std::max(0.0, 1.0 - kept);
  return out;
}

RVector lossy_number_povm(int n, double eta, int idler_cutoff) {
  require_probability(eta, "idler efficiency");
  if (n < 0 || n > idler_cutoff) throw DomainError("herald number outside the idler space");
  RVector diag = RVector::Zero(idler_cutoff + 1);
  for (int m = n; m <= idler_cutoff; ++m) diag(m) = loss_weight(m, m - n, eta);
  return diag;
}

CMatrix project_idler(const TwoModeState& joint, const RVector& povm_diagonal) {
  if (povm_diagonal.size() != joint.amplitudes.cols()) {
    throw DimensionMismatch("POVM and idler dimensions differ");
  }
  return joint.amplitudes * povm_diagonal.asDiagonal() * joint.amplitudes.adjoint();
}

HeraldingModel::HeraldingModel(const ExperimentParams& params, const HilbertConfig& config)
    : params_(params),
      input_(DensityMatrix::from_state(squeezed_vacuum(params.squeeze, config))) {
  params_.validate();
  const DensityMatrix after_opa = loss_channel(input_, 1.0 - params_.opa_loss);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(after_opa.matrix());
  const double largest = es.eigenvalues().maxCoeff();
  double discarded = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lambda = es.eigenvalues()(i);
    if (lambda <= largest * 1e-16) continue;
    TwoModeState joint = beamsplitter_join(StateVector(es.eigenvectors().col(i)),
                                           params_.bs_reflectivity, params_.idler_cutoff);
    discarded += lambda * joint.discarded_weight;
    weights_.push_back(lambda);
    components_.push_back(std::move(joint));
  }
  if (discarded > kIdlerDiscardTolerance) {
    throw TruncationError("idler cutoff " + std::to_string(params_.idler_cutoff) +
                          " discards weight " + std::to_string(discarded));
  }
}

CMatrix HeraldingModel::unnormalized_branch(int n) const {
  const RVector povm = lossy_number_povm(n, params_.idler_efficiency, params_.idler_cutoff);
  const Eigen::Index dim = input_.dim();
  CMatrix rho = CMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    rho += weights_[i] * project_idler(components_[i], povm);
  }
  return rho;
}

HeraldResult HeraldingModel::branch(int n) const {
  const CMatrix heralded = unnormalized_branch(n);
  const double probability = heralded.trace().real();
  if (!(probability >= 1e-300)) {
    throw ZeroProbabilityError("herald probability for n = " + std::to_string(n) + " is zero");
  }
  const DensityMatrix signal = DensityMatrix::normalized(heralded);
  return {loss_channel(signal, params_.signal_efficiency), probability,
          probability * params_.rep_rate_hz * params_.duty_cycle};
}

HeraldResult herald_subtract(const ExperimentParams& params, const HilbertConfig& config) {
  return HeraldingModel(params, config).branch(params.herald_n);
}

std::vector<CountRate> count_rate_table(const ExperimentParams& params, int n_max) {
  if (n_max < 0 || n_max > params.idler_cutoff) throw DomainError("n_max outside the idler space");
  const HeraldingModel model(params, HilbertConfig(params.cutoff));
  std::vector<CountRate> table;
  for (int n = 0; n <= n_max; ++n) {
    const double p = model.unnormalized_branch(n).trace().real();
    table.push_back({n, p, p * params.rep_rate_hz * params.duty_cycle});
  }
  return table;
}

}  // namespace catsim
