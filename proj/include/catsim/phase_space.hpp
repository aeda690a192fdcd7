#pragma once

// Continuous-variable views of Fock-basis states: Wigner functions,
// quadrature-basis density matrices rho(q, q') and marginal distributions.

#include <vector>

#include "catsim/fock.hpp"

namespace catsim {

/// Uniformly spaced, strictly increasing sample points (at least 3).
class QuadAxis {
 public:
  static QuadAxis uniform(double min, double max, int count);

  const RVector& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }
  double step() const { return values_(1) - values_(0); }
  double min() const { return values_(0); }
  double max() const { return values_(values_.size() - 1); }
  double operator[](Eigen::Index i) const { return values_(i); }

 private:
  explicit QuadAxis(RVector v) : values_(std::move(v)) {}
  RVector values_;
};

/// -6 .. 6, 241 points.
QuadAxis default_quad_axis();
/// -5 .. 5, 201 points.
QuadAxis default_wigner_axis();

struct WignerGrid {
  QuadAxis x_axis;
  QuadAxis p_axis;
  RMatrix values;                 ///< values(i, j) = W(x_i, p_j)
  double max_imag_residue = 0.0;  ///< largest discarded imaginary part
};

struct QuadDensityMatrix {
  QuadAxis axis;
  Angle theta;
  CMatrix values;  ///< values(i, j) = <q_i|rho|q_j> in the theta quadrature basis
};

/// Imaginary residue above which a Wigner evaluation is rejected.
inline constexpr double kWignerImagTolerance = 1e-8;

/// W(x, p) from the Fock expansion sum rho_{m,n} W_{n,m}(x, p), with the
/// kernels built from associated Laguerre polynomials in 2(x^2 + p^2).
double wigner_at(const DensityMatrix& rho, double x, double p);
WignerGrid wigner(const DensityMatrix& rho, const QuadAxis& x_axis, const QuadAxis& p_axis);

/// W(x, p) = (1/pi) ∫ e^{2ip'x} <p+p'|rho|p-p'> dp', integrated numerically.
/// Independent of the Laguerre route; used to validate it.
double wigner_integral_oracle(const DensityMatrix& rho, double x, double p);

/// rho(q, q') = sum rho_{n,m} <q_theta|n><m|q'_theta>. theta = 0 is the position
/// basis, theta = pi/2 the momentum basis.
QuadDensityMatrix rho_quad(const DensityMatrix& rho, Angle theta, const QuadAxis& axis);

/// Pr(q | theta): the diagonal of rho_quad.
RVector marginal(const DensityMatrix& rho, Angle theta, const QuadAxis& axis);

/// Marginals for each angle; row k belongs to thetas[k].
RMatrix marginal_sweep(const DensityMatrix& rho, const std::vector<Angle>& thetas,
                       const QuadAxis& axis);

/// (1/pi) sum_n (-1)^n rho_{n,n} = W(0, 0).
double origin_parity(const DensityMatrix& rho);

/// Diagonal peak of Re rho(q, q) on q >= 0 and the matching Re rho(q, -q).
struct CoherenceProbe {
  double peak_position;
  double diagonal;
  double off_diagonal;
};

CoherenceProbe coherence_at_peak(const DensityMatrix& rho, const QuadAxis& axis,
                                 Angle theta = Angle::degrees(90.0));

}  // namespace catsim
