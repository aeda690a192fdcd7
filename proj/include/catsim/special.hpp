#pragma once

// Normalised orthogonal-function recurrences. Normalisation is folded into
// each step so nothing overflows for indices well past 100.

#include <Eigen/Core>
#include <cmath>
#include <numbers>

namespace catsim::special {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Harmonic-oscillator eigenfunctions psi_0(q) ... psi_{max_n}(q),
///   psi_n(q) = pi^{-1/4} (2^n n!)^{-1/2} H_n(q) exp(-q^2/2),
/// by the upward recurrence
///   psi_n = sqrt(2/n) q psi_{n-1} - sqrt((n-1)/n) psi_{n-2}.
template <typename Scalar>
Vector<Scalar> hermite_functions(int max_n, Scalar q) {
  Vector<Scalar> psi(max_n + 1);
  using std::exp;
  using std::sqrt;
  psi(0) = exp(-q * q / Scalar(2)) / sqrt(sqrt(Scalar(std::numbers::pi)));
  if (max_n >= 1) psi(1) = sqrt(Scalar(2)) * q * psi(0);
  for (int n = 2; n <= max_n; ++n) {
    psi(n) = sqrt(Scalar(2) / Scalar(n)) * q * psi(n - 1) -
             sqrt(Scalar(n - 1) / Scalar(n)) * psi(n - 2);
  }
  return psi;
}

/// Column i holds psi_0 .. psi_{max_n} evaluated at q(i).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hermite_function_table(
    int max_n, const Vector<Scalar>& q) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> table(max_n + 1, q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) table.col(i) = hermite_functions<Scalar>(max_n, q(i));
  return table;
}

/// g_n^k(t) = sqrt(n!/(n+k)!) t^{k/2} e^{-t/2} L_n^{(k)}(t) for n = 0 .. count-1.
///
/// These are the radial factors of the Fock-basis Wigner kernels. The
/// three-term Laguerre recurrence is rescaled by the ratio of successive
/// normalisations.
template <typename Scalar>
Vector<Scalar> normalized_laguerre(int k, int count, Scalar t) {
  Vector<Scalar> g(count);
  if (count == 0) return g;
  using std::exp;
  using std::lgamma;
  using std::log;
  using std::sqrt;
  if (k == 0) {
    g(0) = exp(-t / Scalar(2));
  } else if (t <= Scalar(0)) {
    g(0) = Scalar(0);
  } else {
    g(0) = exp(Scalar(0.5) * Scalar(k) * log(t) - t / Scalar(2) -
               Scalar(0.5) * lgamma(Scalar(k + 1)));
  }
  if (count > 1) g(1) = g(0) * (Scalar(1 + k) - t) / sqrt(Scalar(k + 1));
  for (int n = 2; n < count; ++n) {
    const Scalar nn = Scalar(n);
    const Scalar kk = Scalar(k);
    const Scalar a = (Scalar(2) * nn - Scalar(1) + kk - t) * sqrt(nn / (nn + kk));
    const Scalar b = (nn - Scalar(1) + kk) *
                     sqrt(nn * (nn - Scalar(1)) / ((nn + kk) * (nn + kk - Scalar(1))));
    g(n) = (a * g(n - 1) - b * g(n - 2)) / nn;
  }
  return g;
}

}  // namespace catsim::special
