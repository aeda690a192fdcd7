#pragma once

// Truncated Fock-space states and the elementary constructors, operators and
// scalar metrics the rest of the library consumes. hbar = 1 throughout;
// quadratures are x = (a + a^dag)/sqrt2 and p = (a - a^dag)/(i sqrt2), so the
// vacuum variance is 1/2.

#include <Eigen/Core>
#include <complex>
#include <numbers>

#include "catsim/errors.hpp"

namespace catsim {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kHbar = 1.0;
inline constexpr double kDefaultTailTolerance = 1e-6;
inline constexpr int kDefaultCutoff = 30;

/// Phase angle. Files and the CLI speak degrees, the math speaks radians.
class Angle {
 public:
  constexpr Angle() = default;
  static constexpr Angle radians(double r) { return Angle(r); }
  static constexpr Angle degrees(double d) { return Angle(d * std::numbers::pi / 180.0); }
  constexpr double rad() const { return rad_; }
  constexpr double deg() const { return rad_ * 180.0 / std::numbers::pi; }

 private:
  explicit constexpr Angle(double r) : rad_(r) {}
  double rad_ = 0.0;
};

/// Highest retained Fock index; the space has dimension cutoff + 1.
class HilbertConfig {
 public:
  explicit HilbertConfig(int cutoff = kDefaultCutoff) : cutoff_(cutoff) {
    if (cutoff < 1) throw DomainError("cutoff must be >= 1");
  }
  int cutoff() const { return cutoff_; }
  Eigen::Index dim() const { return cutoff_ + 1; }
  friend bool operator==(const HilbertConfig&, const HilbertConfig&) = default;

 private:
  int cutoff_;
};

/// Normalised pure state.
class StateVector {
 public:
  /// Normalises `amplitudes`; throws ZeroStateError on a null vector.
  explicit StateVector(CVector amplitudes);

  const CVector& amplitudes() const { return amplitudes_; }
  HilbertConfig config() const { return HilbertConfig(static_cast<int>(amplitudes_.size()) - 1); }
  int cutoff() const { return static_cast<int>(amplitudes_.size()) - 1; }
  Complex operator[](Eigen::Index n) const { return amplitudes_(n); }

 private:
  CVector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite matrix rho_{n,m} = <n|rho|m>.
class DensityMatrix {
 public:
  /// Validates all invariants; throws InvariantError.
  explicit DensityMatrix(CMatrix elements);

  static DensityMatrix from_state(const StateVector& psi);
  static DensityMatrix vacuum(const HilbertConfig& config);
  static DensityMatrix fock(int n, const HilbertConfig& config);
  /// Hermitises and rescales to unit trace, then validates.
  static DensityMatrix normalized(const CMatrix& unnormalized);

  const CMatrix& matrix() const { return elements_; }
  HilbertConfig config() const { return HilbertConfig(cutoff()); }
  int cutoff() const { return static_cast<int>(elements_.rows()) - 1; }
  Eigen::Index dim() const { return elements_.rows(); }
  Complex operator()(Eigen::Index n, Eigen::Index m) const { return elements_(n, m); }

 private:
  CMatrix elements_;
};

/// Squeezing strength. level_db = 10 log10(e^{2r}).
class SqueezeSpec {
 public:
  static SqueezeSpec from_db(double level_db);
  static SqueezeSpec from_r(double r);
  double r() const { return r_; }
  double db() const { return db_; }
  /// True when built with from_db; configs then round-trip the dB value exactly.
  bool specified_in_db() const { return in_db_; }
  friend bool operator==(const SqueezeSpec&, const SqueezeSpec&) = default;

 private:
  SqueezeSpec(double r, double db, bool in_db) : r_(r), db_(db), in_db_(in_db) {}
  double r_;
  double db_;
  bool in_db_;
};

double squeeze_r_from_db(double level_db);
double squeeze_db_from_r(double r);

enum class CatParity { Even, Odd };

/// S(r)|0> with x squeezed and p anti-squeezed:
///   c_{2k} ∝ (-tanh r)^k sqrt((2k)!) / (2^k k!).
StateVector squeezed_vacuum(const SqueezeSpec& squeeze, const HilbertConfig& config,
                            double tail_tolerance = kDefaultTailTolerance);

StateVector coherent_state(Complex alpha, const HilbertConfig& config,
                           double tail_tolerance = kDefaultTailTolerance);

/// |alpha> ± |-alpha>, normalised. Parity selection is exact: amplitudes of
/// the opposite parity are identically zero.
StateVector cat_state(Complex alpha, CatParity parity, const HilbertConfig& config,
                      double tail_tolerance = kDefaultTailTolerance);

/// (|alpha><alpha| + |-alpha><-alpha|) / 2.
DensityMatrix mixed_coherent(Complex alpha, const HilbertConfig& config,
                             double tail_tolerance = kDefaultTailTolerance);

struct Annihilated {
  StateVector state;
  double norm_squared;  ///< ||a psi||^2 = <n> of the input
};

Annihilated apply_annihilation(const StateVector& psi);

double mean_photon(const DensityMatrix& rho);
double mean_photon(const StateVector& psi);
RVector photon_distribution(const DensityMatrix& rho);
double purity(const DensityMatrix& rho);

/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Zero-pads to a larger cutoff; truncates and renormalises to a smaller one.
DensityMatrix with_cutoff(const DensityMatrix& rho, int cutoff);

/// e^{-i theta n} rho e^{i theta n}.
DensityMatrix rotate(const DensityMatrix& rho, Angle theta);

/// <q_theta|n> = psi_n(q) e^{-i n theta}, where q_theta = x cos(theta) + p sin(theta).
Complex quadrature_wavefunction(int n, double q, Angle theta, const HilbertConfig& config);

/// Probability weight lost above the cutoff for the untruncated states.
double squeezed_tail_weight(double r, int cutoff);
double coherent_tail_weight(double abs_alpha, int cutoff);

}  // namespace catsim
