#include "catsim/fock.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "catsim/special.hpp"

namespace catsim {
namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kTraceTolerance = 1e-10;
constexpr double kPsdTolerance = 1e-9;

void check_tail(double tail, double tolerance, const char* what, int cutoff) {
  if (tail > tolerance) {
    throw TruncationError(std::string(what) + ": weight " + std::to_string(tail) +
                          " above cutoff " + std::to_string(cutoff) + " exceeds tolerance " +
                          std::to_string(tolerance));
  }
}

CVector coherent_amplitudes(Complex alpha, Eigen::Index dim) {
  CVector c(dim);
  c(0) = std::exp(-std::norm(alpha) / 2.0);
  for (Eigen::Index n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
  return c;
}

}  // namespace

StateVector::StateVector(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 2) throw DomainError("state needs at least two Fock levels");
  const double norm = amplitudes_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ZeroStateError("state vector has zero norm");
  amplitudes_ /= norm;
}

DensityMatrix::DensityMatrix(CMatrix elements) : elements_(std::move(elements)) {
  if (elements_.rows() != elements_.cols() || elements_.rows() < 2) {
    throw DimensionMismatch("density matrix must be square with dimension >= 2");
  }
  if (!elements_.allFinite()) throw InvariantError("density matrix has non-finite entries");
  const double asym = (elements_ - elements_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTolerance) {
    throw InvariantError("density matrix not Hermitian (max |rho - rho^dag| = " +
                         std::to_string(asym) + ")");
  }
  const Complex tr = elements_.trace();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    throw InvariantError("density matrix trace " + std::to_string(tr.real()) + " != 1");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(elements_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTolerance) {
    throw InvariantError("density matrix not positive semidefinite (min eigenvalue " +
                         std::to_string(es.eigenvalues().minCoeff()) + ")");
  }
}

DensityMatrix DensityMatrix::from_state(const StateVector& psi) {
  CMatrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
  return normalized(rho);
}

DensityMatrix DensityMatrix::vacuum(const HilbertConfig& config) { return fock(0, config); }

DensityMatrix DensityMatrix::fock(int n, const HilbertConfig& config) {
  if (n < 0 || n > config.cutoff()) throw DomainError("Fock index outside the truncated space");
  CMatrix rho = CMatrix::Zero(config.dim(), config.dim());
  rho(n, n) = 1.0;
  return DensityMatrix(std::move(rho));
}

DensityMatrix DensityMatrix::normalized(const CMatrix& unnormalized) {
  CMatrix rho = (unnormalized + unnormalized.adjoint()) / 2.0;
  const double tr = rho.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) throw ZeroStateError("cannot normalise a zero-trace matrix");
  rho /= tr;
  return DensityMatrix(std::move(rho));
}

double squeeze_r_from_db(double level_db) { return level_db * std::log(10.0) / 20.0; }
double squeeze_db_from_r(double r) { return 20.0 * r / std::log(10.0); }

SqueezeSpec SqueezeSpec::from_db(double level_db) {
  if (!(level_db >= 0.0)) throw DomainError("squeezing level must be >= 0 dB");
  return SqueezeSpec(squeeze_r_from_db(level_db), level_db, true);
}

SqueezeSpec SqueezeSpec::from_r(double r) {
  if (!(r >= 0.0)) throw DomainError("squeezing parameter must be >= 0");
  return SqueezeSpec(r, squeeze_db_from_r(r), false);
}

double squeezed_tail_weight(double r, int cutoff) {
  // P(2k) = sech r (2k)!/(4^k k!^2) tanh^{2k} r, summed over 2k > cutoff.
  const double t2 = std::tanh(r) * std::tanh(r);
  if (t2 == 0.0) return 0.0;
  const int k0 = cutoff / 2 + 1;
  double log_p = -std::log(std::cosh(r)) + std::lgamma(2.0 * k0 + 1) - 2.0 * k0 * std::log(2.0) -
                 2.0 * std::lgamma(k0 + 1.0) + k0 * std::log(t2);
  double p = std::exp(log_p);
  double tail = 0.0;
  for (int k = k0; k < k0 + 100000 && p > 1e-300; ++k) {
    tail += p;
    if (p < tail * 1e-17) break;
    p *= t2 * (2.0 * k + 1.0) / (2.0 * k + 2.0);
  }
  return tail;
}

double coherent_tail_weight(double abs_alpha, int cutoff) {
  const double mean = abs_alpha * abs_alpha;
  if (mean == 0.0) return 0.0;
  const int n0 = cutoff + 1;
  double p = std::exp(-mean + n0 * std::log(mean) - std::lgamma(n0 + 1.0));
  double tail = 0.0;
  for (int n = n0; p > 1e-300; ++n) {
    tail += p;
    if (p < tail * 1e-17 && n > mean) break;
    p *= mean / (n + 1.0);
  }
  return tail;
}

StateVector squeezed_vacuum(const SqueezeSpec& squeeze, const HilbertConfig& config,
                            double tail_tolerance) {
  const double r = squeeze.r();
  check_tail(squeezed_tail_weight(r, config.cutoff()), tail_tolerance, "squeezed vacuum",
             config.cutoff());
  const double t = std::tanh(r);
  CVector c = CVector::Zero(config.dim());
  c(0) = 1.0 / std::sqrt(std::cosh(r));
  for (Eigen::Index n = 2; n < config.dim(); n += 2) {
    c(n) = c(n - 2) * (-t) * std::sqrt((n - 1.0) / double(n));
  }
  return StateVector(std::move(c));
}

StateVector coherent_state(Complex alpha, const HilbertConfig& config, double tail_tolerance) {
  check_tail(coherent_tail_weight(std::abs(alpha), config.cutoff()), tail_tolerance,
             "coherent state", config.cutoff());
  return StateVector(coherent_amplitudes(alpha, config.dim()));
}

StateVector cat_state(Complex alpha, CatParity parity, const HilbertConfig& config,
                      double tail_tolerance) {
  if (parity == CatParity::Odd && alpha == Complex(0.0)) {
    throw DomainError("odd cat state is undefined at alpha = 0");
  }
  check_tail(coherent_tail_weight(std::abs(alpha), config.cutoff()), tail_tolerance, "cat state",
             config.cutoff());
  CVector c = coherent_amplitudes(alpha, config.dim());
  const int keep = parity == CatParity::Even ? 0 : 1;
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    if (n % 2 != keep) c(n) = 0.0;
  }
  return StateVector(std::move(c));
}

DensityMatrix mixed_coherent(Complex alpha, const HilbertConfig& config, double tail_tolerance) {
  const StateVector plus = coherent_state(alpha, config, tail_tolerance);
  const StateVector minus = coherent_state(-alpha, config, tail_tolerance);
  CMatrix rho = 0.5 * (plus.amplitudes() * plus.amplitudes().adjoint() +
                       minus.amplitudes() * minus.amplitudes().adjoint());
  return DensityMatrix::normalized(rho);
}

Annihilated apply_annihilation(const StateVector& psi) {
  const CVector& c = psi.amplitudes();
  CVector out = CVector::Zero(c.size());
  for (Eigen::Index n = 1; n < c.size(); ++n) out(n - 1) = std::sqrt(double(n)) * c(n);
  const double norm2 = out.squaredNorm();
  if (norm2 == 0.0) throw ZeroStateError("annihilation of the vacuum gives the zero vector");
  return {StateVector(std::move(out)), norm2};
}

RVector photon_distribution(const DensityMatrix& rho) { return rho.matrix().diagonal().real(); }

double mean_photon(const DensityMatrix& rho) {
  const RVector p = photon_distribution(rho);
  return RVector::LinSpaced(p.size(), 0.0, double(p.size() - 1)).dot(p);
}

double mean_photon(const StateVector& psi) {
  const RVector p = psi.amplitudes().cwiseAbs2();
  return RVector::LinSpaced(p.size(), 0.0, double(p.size() - 1)).dot(p);
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("fidelity: states have different cutoffs");
  Eigen::SelfAdjointEigenSolver<CMatrix> ea(a.matrix());
  const RVector roots = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CMatrix sqrt_a = ea.eigenvectors() * roots.asDiagonal() * ea.eigenvectors().adjoint();
  CMatrix inner = sqrt_a * b.matrix() * sqrt_a;
  inner = (inner + inner.adjoint()).eval() / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> ei(inner, Eigen::EigenvaluesOnly);
  const double s = ei.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(s * s, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("trace distance: states have different cutoffs");
  CMatrix diff = a.matrix() - b.matrix();
  diff = (diff + diff.adjoint()).eval() / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DensityMatrix with_cutoff(const DensityMatrix& rho, int cutoff) {
  const HilbertConfig target(cutoff);
  if (target.dim() <= rho.dim()) {
    return DensityMatrix::normalized(rho.matrix().topLeftCorner(target.dim(), target.dim()));
  }
  CMatrix padded = CMatrix::Zero(target.dim(), target.dim());
  padded.topLeftCorner(rho.dim(), rho.dim()) = rho.matrix();
  return DensityMatrix(std::move(padded));
}

DensityMatrix rotate(const DensityMatrix& rho, Angle theta) {
  CVector phase(rho.dim());
  for (Eigen::Index n = 0; n < rho.dim(); ++n) phase(n) = std::polar(1.0, -theta.rad() * double(n));
  CMatrix out = phase.asDiagonal() * rho.matrix() * phase.conjugate().asDiagonal();
  return DensityMatrix::normalized(out);
}

Complex quadrature_wavefunction(int n, double q, Angle theta, const HilbertConfig& config) {
  if (n < 0 || n > config.cutoff()) throw DomainError("Fock index outside the truncated space");
  const double psi = special::hermite_functions<double>(n, q)(n);
  return std::polar(psi, -theta.rad() * double(n));
}

}  // namespace catsim
