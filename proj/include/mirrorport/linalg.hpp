#pragma once

// Small dense linear-algebra helpers shared by the Gaussian-state code.
// Everything is templated on the real scalar so the same code runs in
// double, long double or a multiprecision type.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace mirrorport {

template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when a numerical contract (physicality, symplecticity, a moment
/// that must vanish) is violated by data that passed its preconditions.
class NumericalContractError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

template <typename T>
T machine_epsilon() {
  return std::numeric_limits<T>::epsilon();
}

/// Block-diagonal symplectic form with 2x2 blocks [[0,1],[-1,0]].
template <typename T>
Matrix<T> symplectic_form(std::size_t n_modes) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Matrix<T> omega = Matrix<T>::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    omega(k, k + 1) = T(1);
    omega(k + 1, k) = T(-1);
  }
  return omega;
}

template <typename T>
T max_abs(const Matrix<T>& m) {
  using std::abs;
  T best(0);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) best = std::max(best, T(abs(m(i, j))));
  return best;
}

template <typename T>
Matrix<T> symmetrized(const Matrix<T>& m) {
  return (m + m.transpose()) / T(2);
}

/// Max-norm of S Ω Sᵀ − Ω.
template <typename T>
T symplectic_defect(const Matrix<T>& s) {
  const auto n = static_cast<std::size_t>(s.rows() / 2);
  const Matrix<T> omega = symplectic_form<T>(n);
  return max_abs<T>(Matrix<T>(s * omega * s.transpose() - omega));
}

/// Allowed symplectic defect for a map of this magnitude: the product S Ω Sᵀ
/// carries rounding of order eps·‖S‖², so the bound scales with ‖S‖².
template <typename T>
T symplectic_tolerance(const Matrix<T>& s) {
  const T scale = max_abs<T>(s);
  return T(1e-9) * std::max(T(1), scale * scale);
}

/// Matrix exponential by scaling and squaring with a Taylor series whose
/// length adapts to the scalar's precision. Slow but generic: used as an
/// independent route for the propagator, in any precision.
template <typename T>
Matrix<T> expm_taylor(const Matrix<T>& a) {
  using std::ceil;
  using std::log2;
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("expm_taylor: matrix must be square");
  const T norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > T(0.5)) squarings = static_cast<int>(ceil(log2(norm / T(0.5))));
  T scale(1);
  for (int i = 0; i < squarings; ++i) scale /= T(2);
  const Matrix<T> x = a * scale;

  const Matrix<T> id = Matrix<T>::Identity(n, n);
  Matrix<T> result = id;
  Matrix<T> term = id;
  const T eps = machine_epsilon<T>();
  for (int k = 1; k < 1000; ++k) {
    term = term * x / T(k);
    result += term;
    if (max_abs<T>(term) <= eps * max_abs<T>(result)) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

/// Moore–Penrose pseudo-inverse of a small symmetric positive-semidefinite
/// matrix; eigenvalues below `cutoff` are treated as zero.
template <typename T>
Matrix<T> psd_pseudo_inverse(const Matrix<T>& m, T cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix<T>> solver(m);
  const Vector<T>& vals = solver.eigenvalues();
  Vector<T> inv = Vector<T>::Zero(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals(i) > cutoff) inv(i) = T(1) / vals(i);
  return solver.eigenvectors() * inv.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace mirrorport
