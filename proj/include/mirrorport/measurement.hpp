#pragma once

// Gaussian measurements: heterodyne (projection onto coherent states) and
// homodyne (single quadrature), as conditional updates of mean/covariance.

#include "mirrorport/gaussian_state.hpp"

#include <algorithm>
#include <complex>
#include <random>
#include <set>
#include <span>
#include <vector>

namespace mirrorport {

/// Measured-quadrature variances below this are degenerate; the pseudo-inverse
/// then leaves the remaining modes untouched.
inline constexpr double kDegenerateVariance = 1e-12;

struct QuadratureSelector {
  std::size_t mode;
  Quadrature quadrature;
};

namespace detail {

inline Eigen::Index component(const QuadratureSelector& q) {
  return static_cast<Eigen::Index>(2 * q.mode + (q.quadrature == Quadrature::P ? 1 : 0));
}

inline std::vector<std::size_t> complement_modes(std::size_t n_modes, const std::set<std::size_t>& removed) {
  std::vector<std::size_t> keep;
  for (std::size_t m = 0; m < n_modes; ++m)
    if (!removed.count(m)) keep.push_back(m);
  return keep;
}

/// Condition on the values `y` of the phase-space components `measured`
/// (with extra outcome noise `noise`), then discard the modes in `removed`.
/// `gain_inverse` must be the (pseudo-)inverse of Γ_kk + noise.
template <typename T>
GaussianState<T> condition(const GaussianState<T>& s, const std::vector<Eigen::Index>& measured,
                           const Vector<T>& y, const Matrix<T>& gain_inverse,
                           const std::set<std::size_t>& removed) {
  const auto keep = complement_modes(s.n_modes(), removed);
  if (keep.empty()) throw std::invalid_argument("measurement would leave no modes");
  const auto rest = quadrature_indices(keep);
  const Matrix<T> cross = s.cov()(rest, measured);
  const Matrix<T> gain = cross * gain_inverse;
  Vector<T> mean = s.mean()(rest) + gain * (y - s.mean()(measured));
  Matrix<T> cov = s.cov()(rest, rest) - gain * cross.transpose();
  return {std::move(mean), symmetrized<T>(cov)};
}

template <typename T>
Matrix<T> heterodyne_outcome_cov(const GaussianState<T>& s, std::size_t mode) {
  return s.mode_cov(mode) + Matrix<T>::Identity(2, 2) / T(2);
}

}  // namespace detail

/// Posterior of the other modes after projecting `mode` onto |α⟩.
/// The posterior covariance does not depend on α.
template <typename T>
GaussianState<T> heterodyne_condition(const GaussianState<T>& s, std::size_t mode, std::complex<T> alpha) {
  s.check_mode(mode);
  const Matrix<T> outcome_cov = detail::heterodyne_outcome_cov(s, mode);
  Eigen::LLT<Matrix<T>> llt(outcome_cov);
  if (llt.info() != Eigen::Success)
    throw NumericalContractError("heterodyne_condition: Γ_kk + ½I is singular; input state is corrupted");
  const Matrix<T> inv = llt.solve(Matrix<T>::Identity(2, 2));
  const std::size_t m[] = {mode};
  return detail::condition(s, quadrature_indices(m), coherent_mean(alpha), inv, {mode});
}

template <typename T>
struct HeterodyneSample {
  std::complex<T> alpha;
  GaussianState<T> posterior;
};

/// Draws α from its Gaussian law (mean m_k, covariance Γ_kk + ½I in the
/// (√2 Re α, √2 Im α) embedding) and returns the matching posterior.
template <typename T, typename Rng>
HeterodyneSample<T> heterodyne_sample(const GaussianState<T>& s, std::size_t mode, Rng& rng) {
  using std::sqrt;
  s.check_mode(mode);
  const Matrix<T> outcome_cov = detail::heterodyne_outcome_cov(s, mode);
  Eigen::LLT<Matrix<T>> llt(outcome_cov);
  if (llt.info() != Eigen::Success)
    throw NumericalContractError("heterodyne_sample: Γ_kk + ½I is singular; input state is corrupted");
  std::normal_distribution<T> normal(T(0), T(1));
  Vector<T> z(2);
  z(0) = normal(rng);
  z(1) = normal(rng);
  const Vector<T> x = s.mode_mean(mode) + Matrix<T>(llt.matrixL()) * z;
  const std::complex<T> alpha(x(0) / sqrt(T(2)), x(1) / sqrt(T(2)));
  return {alpha, heterodyne_condition(s, mode, alpha)};
}

template <typename T>
T homodyne_variance(const GaussianState<T>& s, std::size_t mode, Quadrature q) {
  s.check_mode(mode);
  const auto k = detail::component({mode, q});
  return s.cov()(k, k);
}

template <typename T>
bool is_degenerate_homodyne(const GaussianState<T>& s, std::size_t mode, Quadrature q) {
  return homodyne_variance(s, mode, q) < T(kDegenerateVariance);
}

/// Joint noiseless measurement of the listed quadratures (they must commute,
/// i.e. belong to distinct modes). Every listed mode is consumed.
template <typename T>
GaussianState<T> condition_on_quadratures(const GaussianState<T>& s, std::span<const QuadratureSelector> measured,
                                          const Vector<T>& values) {
  std::set<std::size_t> removed;
  std::vector<Eigen::Index> comps;
  for (const auto& q : measured) {
    s.check_mode(q.mode);
    if (!removed.insert(q.mode).second)
      throw std::invalid_argument("condition_on_quadratures: two quadratures of one mode do not commute");
    comps.push_back(detail::component(q));
  }
  if (values.size() != static_cast<Eigen::Index>(comps.size()))
    throw std::invalid_argument("condition_on_quadratures: one value per measured quadrature");
  const Matrix<T> inv = psd_pseudo_inverse<T>(s.cov()(comps, comps), T(kDegenerateVariance));
  return detail::condition(s, comps, values, inv, removed);
}

template <typename T>
GaussianState<T> homodyne_condition(const GaussianState<T>& s, std::size_t mode, Quadrature q, T result) {
  const QuadratureSelector sel[] = {{mode, q}};
  Vector<T> v(1);
  v(0) = result;
  return condition_on_quadratures<T>(s, sel, v);
}

/// Draws the outcomes of a joint homodyne measurement from their exact
/// Gaussian law N(m_y, Γ_yy).
template <typename T, typename Rng>
Vector<T> sample_quadratures(const GaussianState<T>& s, std::span<const QuadratureSelector> measured, Rng& rng) {
  using std::sqrt;
  std::vector<Eigen::Index> comps;
  for (const auto& q : measured) {
    s.check_mode(q.mode);
    comps.push_back(detail::component(q));
  }
  const Matrix<T> cov = s.cov()(comps, comps);
  // Eigen-factorization tolerates a singular (degenerate) outcome covariance.
  Eigen::SelfAdjointEigenSolver<Matrix<T>> solver(cov);
  Vector<T> root = solver.eigenvalues();
  for (Eigen::Index i = 0; i < root.size(); ++i) root(i) = sqrt(std::max(T(0), root(i)));
  std::normal_distribution<T> normal(T(0), T(1));
  Vector<T> z(static_cast<Eigen::Index>(comps.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return s.mean()(comps) + solver.eigenvectors() * root.asDiagonal() * z;
}

template <typename T>
struct HomodyneSample {
  T value;
  GaussianState<T> posterior;
};

template <typename T, typename Rng>
HomodyneSample<T> homodyne_sample(const GaussianState<T>& s, std::size_t mode, Quadrature q, Rng& rng) {
  const QuadratureSelector sel[] = {{mode, q}};
  const Vector<T> v = sample_quadratures<T>(s, sel, rng);
  return {v(0), condition_on_quadratures<T>(s, sel, v)};
}

}  // namespace mirrorport
