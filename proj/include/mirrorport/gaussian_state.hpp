#pragma once

// Multimode bosonic Gaussian states in the quadrature picture.
//
// Conventions (used throughout the library):
//   X = (a + a†)/√2,  P = −i(a − a†)/√2,  ħ = 1,
//   so the vacuum covariance is ½·I.  Phase-space vectors are interleaved
//   (X₁, P₁, X₂, P₂, …) and the symplectic form has 2x2 blocks [[0,1],[−1,0]].
//   A coherent state |α⟩ has mean (√2·Re α, √2·Im α).

#include "mirrorport/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mirrorport {

enum class Quadrature { X, P };

template <typename T>
class GaussianState {
public:
  GaussianState(Vector<T> mean, Matrix<T> cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    using std::abs;
    if (mean_.size() == 0 || mean_.size() % 2 != 0)
      throw std::invalid_argument("GaussianState: mean must have even, nonzero length");
    if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size())
      throw std::invalid_argument("GaussianState: covariance shape does not match mean");
    const T asym = max_abs<T>(Matrix<T>(cov_ - cov_.transpose()));
    const T tol = std::max(T(1e-10), T(16) * machine_epsilon<T>() * max_abs<T>(cov_));
    if (asym > tol) {
      std::ostringstream msg;
      msg << "GaussianState: covariance not symmetric (defect " << static_cast<double>(asym) << ")";
      throw std::invalid_argument(msg.str());
    }
    cov_ = symmetrized<T>(cov_);
  }

  std::size_t n_modes() const { return static_cast<std::size_t>(mean_.size() / 2); }
  const Vector<T>& mean() const { return mean_; }
  const Matrix<T>& cov() const { return cov_; }

  Vector<T> mode_mean(std::size_t mode) const {
    check_mode(mode);
    return mean_.template segment<2>(static_cast<Eigen::Index>(2 * mode));
  }
  Matrix<T> mode_cov(std::size_t mode) const {
    check_mode(mode);
    const auto k = static_cast<Eigen::Index>(2 * mode);
    return cov_.block(k, k, 2, 2);
  }

  void check_mode(std::size_t mode) const {
    if (mode >= n_modes()) {
      std::ostringstream msg;
      msg << "mode index " << mode << " out of range for a " << n_modes() << "-mode state";
      throw std::out_of_range(msg.str());
    }
  }

private:
  Vector<T> mean_;
  Matrix<T> cov_;
};

template <typename T>
Vector<T> coherent_mean(std::complex<T> alpha) {
  using std::sqrt;
  Vector<T> m(2);
  m << sqrt(T(2)) * alpha.real(), sqrt(T(2)) * alpha.imag();
  return m;
}

template <typename T>
GaussianState<T> make_vacuum(std::size_t n_modes) {
  if (n_modes == 0) throw std::invalid_argument("make_vacuum: need at least one mode");
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return {Vector<T>::Zero(dim), Matrix<T>::Identity(dim, dim) / T(2)};
}

template <typename T>
GaussianState<T> make_thermal(T nbar) {
  if (!(nbar >= T(0))) throw std::invalid_argument("make_thermal: mean occupation must be >= 0");
  return {Vector<T>::Zero(2), Matrix<T>::Identity(2, 2) * (nbar + T(0.5))};
}

template <typename T>
GaussianState<T> make_coherent(std::complex<T> alpha) {
  return {coherent_mean(alpha), Matrix<T>::Identity(2, 2) / T(2)};
}

template <typename T>
GaussianState<T> tensor(const GaussianState<T>& a, const GaussianState<T>& b) {
  const auto na = a.mean().size();
  const auto nb = b.mean().size();
  Vector<T> mean(na + nb);
  mean << a.mean(), b.mean();
  Matrix<T> cov = Matrix<T>::Zero(na + nb, na + nb);
  cov.topLeftCorner(na, na) = a.cov();
  cov.bottomRightCorner(nb, nb) = b.cov();
  return {std::move(mean), std::move(cov)};
}

template <typename T>
GaussianState<T> displace(const GaussianState<T>& s, std::size_t mode, T dx, T dp) {
  s.check_mode(mode);
  Vector<T> mean = s.mean();
  mean(static_cast<Eigen::Index>(2 * mode)) += dx;
  mean(static_cast<Eigen::Index>(2 * mode + 1)) += dp;
  return {std::move(mean), s.cov()};
}

/// mean → S·mean, cov → S·cov·Sᵀ. Throws if S is not symplectic.
template <typename T>
GaussianState<T> apply_symplectic(const GaussianState<T>& s, const Matrix<T>& sym) {
  if (sym.rows() != s.mean().size() || sym.cols() != s.mean().size())
    throw std::invalid_argument("apply_symplectic: matrix dimension does not match state");
  const T defect = symplectic_defect<T>(sym);
  if (defect > symplectic_tolerance<T>(sym)) {
    std::ostringstream msg;
    msg << "apply_symplectic: matrix is not symplectic (defect " << static_cast<double>(defect) << ")";
    throw std::invalid_argument(msg.str());
  }
  return {sym * s.mean(), symmetrized<T>(sym * s.cov() * sym.transpose())};
}

/// Indices of the phase-space components belonging to the listed modes.
inline std::vector<Eigen::Index> quadrature_indices(std::span<const std::size_t> modes) {
  std::vector<Eigen::Index> idx;
  idx.reserve(2 * modes.size());
  for (auto m : modes) {
    idx.push_back(static_cast<Eigen::Index>(2 * m));
    idx.push_back(static_cast<Eigen::Index>(2 * m + 1));
  }
  return idx;
}

template <typename T>
GaussianState<T> partial_trace(const GaussianState<T>& s, std::span<const std::size_t> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep list is empty");
  for (auto m : keep) s.check_mode(m);
  const auto idx = quadrature_indices(keep);
  return {s.mean()(idx), s.cov()(idx, idx)};
}

template <typename T>
GaussianState<T> partial_trace(const GaussianState<T>& s, std::initializer_list<std::size_t> keep) {
  return partial_trace(s, std::span<const std::size_t>(keep.begin(), keep.size()));
}

/// Symplectic eigenvalues in ascending order, or an empty vector when the
/// covariance is not positive definite (then it cannot be physical).
///
/// With V = L Lᵀ, the antisymmetric K = Lᵀ Ω L has eigenvalues ±iν, so the
/// symmetric −K² = K Kᵀ has each ν² twice.
template <typename T>
std::vector<T> symplectic_eigenvalues(const Matrix<T>& cov) {
  using std::sqrt;
  Eigen::LLT<Matrix<T>> llt(cov);
  if (llt.info() != Eigen::Success) return {};
  const Matrix<T> l = llt.matrixL();
  const auto n = static_cast<std::size_t>(cov.rows() / 2);
  const Matrix<T> k = l.transpose() * symplectic_form<T>(n) * l;
  Eigen::SelfAdjointEigenSolver<Matrix<T>> solver(Matrix<T>(k * k.transpose()), Eigen::EigenvaluesOnly);
  const Vector<T>& sq = solver.eigenvalues();
  std::vector<T> nu;
  nu.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = static_cast<Eigen::Index>(2 * i);
    nu.push_back(sqrt(std::max(T(0), (sq(a) + sq(a + 1)) / T(2))));
  }
  return nu;
}

/// Absolute slack on ν ≥ ½. Rounding in a covariance with entries of size
/// ‖V‖ is about eps·‖V‖, which dominates 1e-9 for strongly amplified states.
template <typename T>
T physicality_tolerance(const Matrix<T>& cov) {
  return std::max(T(1e-9), T(64) * machine_epsilon<T>() * max_abs<T>(cov));
}

template <typename T>
bool is_physical(const Matrix<T>& cov) {
  const auto nu = symplectic_eigenvalues<T>(cov);
  if (nu.empty()) return false;
  return nu.front() >= T(0.5) - physicality_tolerance<T>(cov);
}

template <typename T>
bool is_physical(const GaussianState<T>& s) {
  return is_physical<T>(s.cov());
}

template <typename T>
bool is_pure(const GaussianState<T>& s) {
  using std::abs;
  const auto nu = symplectic_eigenvalues<T>(s.cov());
  if (nu.empty()) return false;
  const T tol = physicality_tolerance<T>(s.cov());
  return std::all_of(nu.begin(), nu.end(), [&](T v) { return abs(v - T(0.5)) <= tol; });
}

}  // namespace mirrorport
