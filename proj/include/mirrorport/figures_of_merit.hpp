#pragma once

#include "mirrorport/gaussian_state.hpp"

#include <cmath>
#include <stdexcept>

namespace mirrorport {

/// Overlap Tr(ρ_in ρ_out) between a pure Gaussian state and an arbitrary
/// Gaussian state of the same size:
///   exp(−½ δᵀ (V_in+V_out)⁻¹ δ) / √det(V_in+V_out),  δ = mean difference.
/// With vacuum variance ½ this is exactly 1 for identical pure states.
template <typename T>
T overlap_with_pure_gaussian(const GaussianState<T>& pure_in, const GaussianState<T>& out) {
  using std::exp;
  using std::sqrt;
  if (pure_in.n_modes() != out.n_modes())
    throw std::invalid_argument("overlap_with_pure_gaussian: mode counts differ");
  if (!is_pure(pure_in)) throw std::invalid_argument("overlap_with_pure_gaussian: reference state is not pure");
  const Matrix<T> sum = pure_in.cov() + out.cov();
  Eigen::LLT<Matrix<T>> llt(sum);
  if (llt.info() != Eigen::Success) throw NumericalContractError("overlap_with_pure_gaussian: V_in + V_out singular");
  const Vector<T> delta = out.mean() - pure_in.mean();
  const T quad = delta.dot(llt.solve(delta));
  const T det = sum.determinant();
  const T f = exp(-quad / T(2)) / sqrt(det);
  return std::clamp(f, T(0), T(1));
}

/// Covariance after partial transposition of the second mode (P₂ → −P₂).
template <typename T>
Matrix<T> partial_transpose_second(const Matrix<T>& cov) {
  Matrix<T> flip = Matrix<T>::Identity(4, 4);
  flip(3, 3) = T(-1);
  return flip * cov * flip;
}

/// E_N = max(0, −log₂(2ν̃₋)), ν̃₋ the smallest symplectic eigenvalue of the
/// partially transposed covariance.
template <typename T>
T log_negativity(const GaussianState<T>& s) {
  using std::log2;
  if (s.n_modes() != 2) throw std::invalid_argument("log_negativity: needs a two-mode state");
  const auto nu = symplectic_eigenvalues<T>(partial_transpose_second<T>(s.cov()));
  if (nu.empty()) throw NumericalContractError("log_negativity: covariance is not positive definite");
  return std::max(T(0), -log2(T(2) * nu.front()));
}

}  // namespace mirrorport
