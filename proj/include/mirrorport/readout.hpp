#pragma once

// Verification readout: a second pulse with the same interaction, followed
// by heterodyne detection of the combined sideband mode a₁(t) − a₂†(t).
// Under the flow it stays in the span of {b†(0), a₁(0), a₂†(0)}:
//   a₁(t) − a₂†(t) = (χ − σθ) s · b† + (1 + χ(χ − σθ) k) · a₁ + (−1 + θ(θ − σχ) k) · a₂†
// with s = sin(Θt)/Θ, k = (1 − cos Θt)/Θ², σ = ±1 the sign of θ in H.

#include "mirrorport/dynamics.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <sstream>

namespace mirrorport {

template <typename T>
struct ReadoutCoefficients {
  T c_b{0};   // of b†(0)
  T c_a1{0};  // of a₁(0)
  T c_a2{0};  // of a₂†(0)
};

/// Ladder coefficients of a₁(t) − a₂†(t), read off the quadrature
/// propagator `s`. Components outside {b†, a₁, a₂†} and imaginary parts must
/// vanish.
template <typename T>
ReadoutCoefficients<T> ladder_readout_from_propagator(const Matrix<T>& s) {
  using std::abs;
  using std::sqrt;
  using C = std::complex<T>;
  const T r2 = sqrt(T(2));
  const C i(T(0), T(1));
  // a₁(t) − a₂†(t) = [X₁ + iP₁ − X₂ + iP₂](t)/√2 as a row over (X₁,P₁,X_b,P_b,X₂,P₂)(0)
  std::array<C, 6> row;
  for (int j = 0; j < 6; ++j) row[j] = (C(s(0, j)) + i * s(1, j) - C(s(4, j)) + i * s(5, j)) / r2;
  std::array<C, 3> ann, cre;  // coefficients of a_j and a_j†
  for (int m = 0; m < 3; ++m) {
    ann[m] = (row[2 * m] - i * row[2 * m + 1]) / r2;
    cre[m] = (row[2 * m] + i * row[2 * m + 1]) / r2;
  }
  const T tol = T(1e-9) * std::max(T(1), max_abs<T>(s));
  const C leftovers[] = {cre[0], ann[1], ann[2]};
  for (const C& v : leftovers)
    if (abs(v) > tol) throw NumericalContractError("readout: combined mode left the span of {b+, a1, a2+}");
  const C kept[] = {cre[1], ann[0], cre[2]};
  for (const C& v : kept)
    if (abs(v.imag()) > tol) throw NumericalContractError("readout: coefficient acquired an imaginary part");
  return {cre[1].real(), ann[0].real(), cre[2].real()};
}

template <typename T>
ReadoutCoefficients<T> readout_coefficients(const Couplings<T>& c, T t, int sigma = 1) {
  return ladder_readout_from_propagator(propagator(c, t, sigma));
}

/// The closed form as printed in the verification scheme:
///   (χ+θ) sin(Θt)/Θ · b†
///   + [θ² − χ² cos Θt − χθ + χθ cos Θt]/Θ² · a₁
///   − [χθ + χθ cos Θt − χ² − θ² cos Θt]/Θ² · a₂†
/// evaluated in the algebraically identical, cancellation-free form
///   1 + χ(χ − θ)k   and   (θ − χ)/(θ + χ) − θ(θ − χ)k.
template <typename T>
ReadoutCoefficients<T> printed_readout_coefficients(const Couplings<T>& c, T t) {
  const auto kern = flow_kernel(c.gap, t);
  const T diff = c.gap / (c.theta + c.chi);  // θ − χ
  return {(c.chi + c.theta) * kern.s, T(1) - c.chi * diff * kern.k,
          diff / (c.theta + c.chi) - c.theta * diff * kern.k};
}

/// printed − derived, per coefficient. Reported, never asserted to vanish.
template <typename T>
ReadoutCoefficients<T> printed_formula_residual(const Couplings<T>& c, T t, int sigma = 1) {
  const auto p = printed_readout_coefficients(c, t);
  const auto d = readout_coefficients(c, t, sigma);
  return {p.c_b - d.c_b, p.c_a1 - d.c_a1, p.c_a2 - d.c_a2};
}

/// θ(θ − χ)/[Θ(θ + χ)]; the mirror term dominates the readout when ≪ 1.
/// Uses θ − χ = Θ²/(θ + χ), i.e. the ratio equals θΘ/(θ + χ)².
template <typename T>
T dominance_ratio(const Couplings<T>& c) {
  const T sum = c.theta + c.chi;
  const T big_theta = c.big_theta();
  if (!(big_theta > T(0))) throw std::invalid_argument("dominance_ratio: requires θ > χ");
  return c.theta * big_theta / (sum * sum);
}

}  // namespace mirrorport
