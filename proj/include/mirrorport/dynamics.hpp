#pragma once

// Radiation-pressure coupling of a mirror vibrational mode b to the Stokes
// (a₁, ω₀−Ω) and anti-Stokes (a₂, ω₀+Ω) sidebands of an intense pump:
//
//   H = −iχ(a₁b − a₁†b†) − iθ(a₂b† − a₂†b)
//
// Heisenberg equations (derivation in docs/dynamics.md):
//   ȧ₁ = χ b†,   ḃ = χ a₁† − θ a₂,   ȧ₂ = θ b,
// so b̈ = −(θ² − χ²) b and the motion is periodic with Θ = √(θ² − χ²).
//
// Frequencies quoted in Hz are used as angular frequencies (rad/s).

#include "mirrorport/gaussian_state.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mirrorport {

namespace constants {
inline constexpr long double speed_of_light = 299792458.0L;     // m/s
inline constexpr long double hbar = 1.054571817e-34L;           // J s
inline constexpr long double boltzmann = 1.380649e-23L;         // J/K
}  // namespace constants

/// Laser and mirror parameters, SI units, angular frequencies in rad/s.
template <typename T>
struct PhysicalParams {
  T power_w{10};
  T omega0_rad_s{2e15};
  T omega_m_rad_s{5e8};
  T phi0_rad{0};
  T mass_kg{T(1e-10)};
  T dnu_det_rad_s{1e7};
  T dnu_mode_rad_s{1e3};
  std::optional<T> temperature_k;
  std::optional<T> nbar;
  T gamma_m_hz{1};  // only used by the decoherence timing budget
};

/// Throws std::invalid_argument on unusable parameters; returns warnings for
/// parameters that weaken the rotating-wave approximation.
template <typename T>
std::vector<std::string> validate(const PhysicalParams<T>& p) {
  const auto positive = [](T v, const char* name) {
    if (!(v > T(0))) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(p.power_w, "power_w");
  positive(p.omega0_rad_s, "omega0_rad_s");
  positive(p.omega_m_rad_s, "omega_m_rad_s");
  positive(p.mass_kg, "mass_kg");
  positive(p.dnu_det_rad_s, "dnu_det_rad_s");
  positive(p.dnu_mode_rad_s, "dnu_mode_rad_s");
  if (p.gamma_m_hz < T(0)) throw std::invalid_argument("gamma_m_hz must be >= 0");
  if (!(p.omega_m_rad_s < p.omega0_rad_s))
    throw std::invalid_argument("mechanical frequency must be below the carrier frequency");
  if (p.temperature_k && *p.temperature_k < T(0)) throw std::invalid_argument("temperature_k must be >= 0");
  if (p.nbar && *p.nbar < T(0)) throw std::invalid_argument("nbar must be >= 0");

  std::vector<std::string> warnings;
  if (!(p.dnu_det_rad_s < p.omega_m_rad_s))
    warnings.push_back("detection bandwidth is not below the mechanical frequency; rotating-wave approximation invalid");
  else if (p.dnu_det_rad_s > p.omega_m_rad_s / T(10))
    warnings.push_back("detection bandwidth exceeds a tenth of the mechanical frequency; rotating-wave approximation is marginal");
  return warnings;
}

/// Coupling constants χ (parametric a₁–b) and θ (beam-splitter a₂–b).
/// `gap` is θ² − χ² kept separately so it can be computed without the
/// cancellation of the difference of squares; Θ = √gap when gap > 0.
template <typename T>
struct Couplings {
  T chi;
  T theta;
  T gap;

  T big_theta() const {
    using std::sqrt;
    return gap > T(0) ? sqrt(gap) : T(0);
  }
};

template <typename T>
Couplings<T> make_couplings(T chi, T theta) {
  if (chi < T(0) || theta < T(0)) throw std::invalid_argument("couplings must be non-negative");
  return {chi, theta, (theta - chi) * (theta + chi)};
}

/// χ = cos φ₀ √(℘ Δν_det² ω₁ / (2 M Δν_mode c² Ω)),  θ = χ √(ω₂/ω₁),
/// with ω₁,₂ = ω₀ ∓ Ω, and Θ² = θ² − χ² = 2Ω χ²/ω₁ computed directly.
template <typename T>
Couplings<T> couplings_from_params(const PhysicalParams<T>& p) {
  using std::cos;
  using std::sqrt;
  validate(p);
  const T c = T(constants::speed_of_light);
  const T omega1 = p.omega0_rad_s - p.omega_m_rad_s;
  const T omega2 = p.omega0_rad_s + p.omega_m_rad_s;
  const T chi = cos(p.phi0_rad) *
                sqrt(p.power_w * p.dnu_det_rad_s * p.dnu_det_rad_s * omega1 /
                     (T(2) * p.mass_kg * p.dnu_mode_rad_s * c * c * p.omega_m_rad_s));
  if (!(chi > T(0))) throw std::invalid_argument("incidence angle leaves no coupling (cos φ₀ <= 0)");
  const T theta = chi * sqrt(omega2 / omega1);
  const T gap = T(2) * p.omega_m_rad_s * chi * chi / omega1;
  return {chi, theta, gap};
}

/// n̄ = 1/(exp(ħΩ/k_B T) − 1), zero at T = 0.
template <typename T>
T nbar_from_temperature(T temperature_k, T omega_m_rad_s) {
  using std::expm1;
  if (temperature_k < T(0)) throw std::invalid_argument("temperature must be >= 0");
  if (temperature_k == T(0)) return T(0);
  const T x = T(constants::hbar) * omega_m_rad_s / (T(constants::boltzmann) * temperature_k);
  return T(1) / expm1(x);
}

template <typename T>
T temperature_from_nbar(T nbar, T omega_m_rad_s) {
  using std::log1p;
  if (nbar < T(0)) throw std::invalid_argument("nbar must be >= 0");
  if (nbar == T(0)) return T(0);
  return T(constants::hbar) * omega_m_rad_s / (T(constants::boltzmann) * log1p(T(1) / nbar));
}

template <typename T>
T resolved_nbar(const PhysicalParams<T>& p) {
  if (p.nbar) return *p.nbar;
  if (p.temperature_k) return nbar_from_temperature(*p.temperature_k, p.omega_m_rad_s);
  return T(0);
}

/// Drift matrix A with d⟨v⟩/dt = A⟨v⟩, v = (X_a1, P_a1, X_b, P_b, X_a2, P_a2).
/// `sigma` = −1 flips the sign of θ in the Hamiltonian (readout variant).
template <typename T>
Matrix<T> drift_matrix(const Couplings<T>& c, int sigma = 1) {
  const T chi = c.chi;
  const T tau = sigma >= 0 ? c.theta : -c.theta;
  Matrix<T> a = Matrix<T>::Zero(6, 6);
  a(0, 2) = chi;    // Ẋa1 = χ Xb
  a(1, 3) = -chi;   // Ṗa1 = −χ Pb
  a(2, 0) = chi;    // Ẋb = χ Xa1 − θ Xa2
  a(2, 4) = -tau;
  a(3, 1) = -chi;   // Ṗb = −χ Pa1 − θ Pa2
  a(3, 5) = -tau;
  a(4, 2) = tau;    // Ẋa2 = θ Xb
  a(5, 3) = tau;    // Ṗa2 = θ Pb
  return a;
}

/// sin(Θt)/Θ, (1 − cos Θt)/Θ² and cos Θt for signed Θ² (`gap`): oscillatory
/// for gap > 0, hyperbolic for gap < 0, series when |Θt| < 1e-6.
template <typename T>
struct FlowKernel {
  T s;
  T k;
  T c;
};

template <typename T>
FlowKernel<T> flow_kernel(T gap, T t) {
  using std::abs;
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  const T x2 = gap * t * t;
  if (abs(x2) < T(1e-12)) {
    const T s = t * (T(1) - x2 / T(6) + x2 * x2 / T(120));
    const T k = t * t / T(2) * (T(1) - x2 / T(12) + x2 * x2 / T(360));
    return {s, k, T(1) - gap * k};
  }
  if (gap > T(0)) {
    const T w = sqrt(gap);
    const T h = sin(w * t / T(2)) / w;
    return {sin(w * t) / w, T(2) * h * h, cos(w * t)};
  }
  const T w = sqrt(-gap);
  const T h = sinh(w * t / T(2)) / w;
  return {sinh(w * t) / w, T(2) * h * h, cosh(w * t)};
}

/// S(t) = exp(A t). The drift matrix satisfies A³ = −Θ² A, so the
/// exponential collapses onto its spectrum {0, ±iΘ}:
///   exp(At) = I + sin(Θt)/Θ · A + (1 − cos Θt)/Θ² · A².
template <typename T>
Matrix<T> propagator(const Couplings<T>& c, T t, int sigma = 1) {
  if (t < T(0)) throw std::invalid_argument("propagator: time must be >= 0");
  const Matrix<T> a = drift_matrix(c, sigma);
  const auto kern = flow_kernel(c.gap, t);
  return Matrix<T>::Identity(6, 6) + kern.s * a + kern.k * (a * a);
}

/// Entries above 1e8 leave little headroom for double-precision covariances.
template <typename T>
bool exceeds_precision_budget(const Matrix<T>& s) {
  return max_abs<T>(s) > T(1e8);
}

/// Propagator assembled from the explicit ladder-operator solution
///   a₁(t) = (1+χ²k) a₁ + χs b† − χθk a₂†
///   b(t)  = χs a₁† + cos(Θt) b − θs a₂
///   a₂(t) = θχk a₁† + θs b + (1 − θ²k) a₂
/// with s = sin(Θt)/Θ, k = (1−cos Θt)/Θ². An operator α·a + β·a† maps to
/// quadrature rows (α+β) on X and (α−β) on P.
template <typename T>
Matrix<T> closed_form_propagator(const Couplings<T>& c, T t, int sigma = 1) {
  if (t < T(0)) throw std::invalid_argument("closed_form_propagator: time must be >= 0");
  const T chi = c.chi;
  const T tau = sigma >= 0 ? c.theta : -c.theta;
  const auto [s, k, cs] = flow_kernel(c.gap, t);
  Matrix<T> m = Matrix<T>::Zero(6, 6);
  // rows of X: (X_a1, X_b, X_a2) columns 0,2,4; rows of P: columns 1,3,5
  const T a1[3] = {T(1) + chi * chi * k, chi * s, -chi * tau * k};     // α + β
  const T a1p[3] = {T(1) + chi * chi * k, -chi * s, chi * tau * k};    // α − β
  const T b[3] = {chi * s, cs, -tau * s};
  const T bp[3] = {-chi * s, cs, -tau * s};
  const T a2[3] = {tau * chi * k, tau * s, T(1) - tau * tau * k};
  const T a2p[3] = {-tau * chi * k, tau * s, T(1) - tau * tau * k};
  for (int j = 0; j < 3; ++j) {
    m(0, 2 * j) = a1[j];
    m(1, 2 * j + 1) = a1p[j];
    m(2, 2 * j) = b[j];
    m(3, 2 * j + 1) = bp[j];
    m(4, 2 * j) = a2[j];
    m(5, 2 * j + 1) = a2p[j];
  }
  return m;
}

/// Initial product state vacuum(a₁) ⊗ thermal(n̄)(b) ⊗ vacuum(a₂), in that order.
template <typename T>
GaussianState<T> initial_state(T nbar) {
  return tensor(tensor(make_vacuum<T>(1), make_thermal<T>(nbar)), make_vacuum<T>(1));
}

/// Three-mode state (a₁, b, a₂) after an interaction of duration t.
template <typename T>
GaussianState<T> evolve_initial(const Couplings<T>& c, T nbar, T t, int sigma = 1) {
  return apply_symplectic(initial_state<T>(nbar), propagator(c, t, sigma));
}

}  // namespace mirrorport
