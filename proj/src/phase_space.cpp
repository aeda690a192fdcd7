#include "catsim/phase_space.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "catsim/special.hpp"

namespace catsim {
namespace {

constexpr double kInvPi = 1.0 / std::numbers::pi;

// Row vector a with a(n) = <q_theta|n>.
Eigen::RowVectorXcd quadrature_row(int cutoff, double q, Angle theta) {
  const RVector psi = special::hermite_functions<double>(cutoff, q);
  Eigen::RowVectorXcd row(psi.size());
  for (Eigen::Index n = 0; n < psi.size(); ++n) row(n) = std::polar(psi(n), -theta.rad() * double(n));
  return row;
}

// A(i, n) = <q_i theta|n>.
CMatrix quadrature_matrix(int cutoff, Angle theta, const RVector& q) {
  const RMatrix psi = special::hermite_function_table<double>(cutoff, q);
  CMatrix a(q.size(), cutoff + 1);
  for (Eigen::Index n = 0; n <= cutoff; ++n) {
    const Complex phase = std::polar(1.0, -theta.rad() * double(n));
    a.col(n) = psi.row(n).transpose().cast<Complex>() * phase;
  }
  return a;
}

Complex wigner_complex(const CMatrix& rho, double x, double p) {
  const int cutoff = static_cast<int>(rho.rows()) - 1;
  const double t = 2.0 * (x * x + p * p);
  const Complex rotor = t > 0.0 ? std::polar(1.0, -std::atan2(p, x)) : Complex(1.0);
  Complex w = 0.0;
  Complex phase_k = 1.0;  // e^{-i k phi}
  for (int k = 0; k <= cutoff; ++k) {
    const RVector g = special::normalized_laguerre<double>(k, cutoff - k + 1, t);
    Complex sum = 0.0;
    for (int n = 0; n + k <= cutoff; ++n) {
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      const Complex kernel = sign * g(n) * phase_k;  // pi W_{n+k,n}
      if (k == 0) {
        sum += rho(n, n) * kernel;
      } else {
        sum += rho(n + k, n) * kernel + rho(n, n + k) * std::conj(kernel);
      }
    }
    w += sum;
    phase_k *= rotor;
  }
  return w * kInvPi;
}

}  // namespace

QuadAxis QuadAxis::uniform(double min, double max, int count) {
  if (count < 3) throw DomainError("quadrature axis needs at least 3 points");
  if (!(max > min)) throw DomainError("quadrature axis must be strictly increasing");
  return QuadAxis(RVector::LinSpaced(count, min, max));
}

QuadAxis default_quad_axis() { return QuadAxis::uniform(-6.0, 6.0, 241); }
QuadAxis default_wigner_axis() { return QuadAxis::uniform(-5.0, 5.0, 201); }

double wigner_at(const DensityMatrix& rho, double x, double p) {
  const Complex w = wigner_complex(rho.matrix(), x, p);
  if (std::abs(w.imag()) > kWignerImagTolerance) {
    throw InvariantError("Wigner value has imaginary residue " + std::to_string(w.imag()));
  }
  return w.real();
}

WignerGrid wigner(const DensityMatrix& rho, const QuadAxis& x_axis, const QuadAxis& p_axis) {
  WignerGrid grid{x_axis, p_axis, RMatrix(x_axis.size(), p_axis.size()), 0.0};
  for (Eigen::Index i = 0; i < x_axis.size(); ++i) {
    for (Eigen::Index j = 0; j < p_axis.size(); ++j) {
      const Complex w = wigner_complex(rho.matrix(), x_axis[i], p_axis[j]);
      grid.max_imag_residue = std::max(grid.max_imag_residue, std::abs(w.imag()));
      grid.values(i, j) = w.real();
    }
  }
  if (grid.max_imag_residue > kWignerImagTolerance) {
    throw InvariantError("Wigner grid has imaginary residue " +
                         std::to_string(grid.max_imag_residue));
  }
  return grid;
}

double wigner_integral_oracle(const DensityMatrix& rho, double x, double p) {
  const int cutoff = rho.cutoff();
  // Momentum wavefunctions vanish well past the classical turning point.
  const double support = std::sqrt(2.0 * cutoff + 1.0) + 8.0;
  const double half_width = support + std::abs(p);
  const Angle momentum = Angle::degrees(90.0);
  auto integrand = [&](double s) {
    const Eigen::RowVectorXcd bra = quadrature_row(cutoff, p + s, momentum);
    const Eigen::RowVectorXcd ket = quadrature_row(cutoff, p - s, momentum);
    const Complex element = (bra * rho.matrix() * ket.adjoint())(0, 0);
    return (std::polar(1.0, 2.0 * s * x) * element).real();
  };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -half_width, half_width, 20, 1e-13, &error);
  if (!(error < 1e-9)) {
    throw ConvergenceError("Wigner integral did not converge (error estimate " +
                           std::to_string(error) + ")");
  }
  return value * kInvPi;
}

QuadDensityMatrix rho_quad(const DensityMatrix& rho, Angle theta, const QuadAxis& axis) {
  const CMatrix a = quadrature_matrix(rho.cutoff(), theta, axis.values());
  return {axis, theta, a * rho.matrix() * a.adjoint()};
}

RVector marginal(const DensityMatrix& rho, Angle theta, const QuadAxis& axis) {
  const CMatrix a = quadrature_matrix(rho.cutoff(), theta, axis.values());
  const CMatrix ar = a * rho.matrix();
  return ar.cwiseProduct(a.conjugate()).rowwise().sum().real();
}

RMatrix marginal_sweep(const DensityMatrix& rho, const std::vector<Angle>& thetas,
                       const QuadAxis& axis) {
  RMatrix out(static_cast<Eigen::Index>(thetas.size()), axis.size());
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = marginal(rho, thetas[k], axis).transpose();
  }
  return out;
}

double origin_parity(const DensityMatrix& rho) {
  double sum = 0.0;
  for (Eigen::Index n = 0; n < rho.dim(); ++n) sum += (n % 2 == 0 ? 1.0 : -1.0) * rho(n, n).real();
  return sum * kInvPi;
}

CoherenceProbe coherence_at_peak(const DensityMatrix& rho, const QuadAxis& axis, Angle theta) {
  const RVector diag = marginal(rho, theta, axis);
  Eigen::Index best = -1;
  for (Eigen::Index i = 0; i < axis.size(); ++i) {
    if (axis[i] < 0.0) continue;
    if (best < 0 || diag(i) > diag(best)) best = i;
  }
  if (best < 0) throw DomainError("axis has no non-negative points");
  const double q = axis[best];
  const Eigen::RowVectorXcd bra = quadrature_row(rho.cutoff(), q, theta);
  const Eigen::RowVectorXcd ket = quadrature_row(rho.cutoff(), -q, theta);
  const Complex off = (bra * rho.matrix() * ket.adjoint())(0, 0);
  return {q, diag(best), off.real()};
}

}  // namespace catsim
