#pragma once

// Teleportation of a coherent state onto the mirror mode b.
//
// The three-mode state is summarised by the coefficients of its normally
// ordered characteristic function
//   Φ = exp[−A|μ|² − B|ν|² − E|ζ|² + C(μν + μ*ν*) + F(μζ + μ*ζ*) + D(νζ* + ν*ζ)]
// (μ, ν, ζ ↔ a₁, b, a₂). Expanding ⟨e^{μa†}e^{−μ*a}⟩ gives
//   A = ⟨a₁†a₁⟩, B = ⟨b†b⟩, E = ⟨a₂†a₂⟩, C = ⟨a₁b⟩, F = ⟨a₁a₂⟩, D = −⟨b†a₂⟩.
// Note the minus sign on D: it comes from the −ν*b factor of the normal
// ordering and is what makes the heterodyne-conditioned matrix below exact.
//
// Protocol: heterodyne a₂ (outcome α), mix the input with a₁ on a balanced
// beam splitter, homodyne X₊ = (X_in + X_a1)/√2 and P₋ = (P_in − P_a1)/√2,
// then displace b by (√2 X₊ + g_x √2 Re α, √2 P₋ + g_p √2 Im α).

#include "mirrorport/dynamics.hpp"
#include "mirrorport/figures_of_merit.hpp"
#include "mirrorport/parallel.hpp"

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace mirrorport {

template <typename T>
struct NormalCoefficients {
  T A{0};
  T B{0};
  T C{0};
  T D{0};
  T E{0};
  T F{0};
};

/// Reads the six coefficients off a zero-mean three-mode state (a₁, b, a₂).
/// Moments outside the characteristic-function form (complex or
/// beam-splitter-type cross terms, single-mode squeezing) must vanish to
/// 1e-8 relative; anything else signals a convention fault upstream.
template <typename T>
NormalCoefficients<T> extract_coefficients(const GaussianState<T>& s) {
  using std::abs;
  if (s.n_modes() != 3) throw std::invalid_argument("extract_coefficients: needs the three-mode (a1, b, a2) state");
  const Matrix<T>& v = s.cov();
  const T tol = T(1e-8) * (T(1) + max_abs<T>(v));
  if (max_abs<T>(Matrix<T>(s.mean())) > tol) throw std::invalid_argument("extract_coefficients: state must have zero mean");

  const std::pair<const char*, T> discarded[] = {
      {"Im<a1 b>", (v(0, 3) + v(1, 2)) / T(2)},
      {"Re<a1+ b>", (v(0, 2) + v(1, 3)) / T(2)},
      {"Im<a1+ b>", (v(0, 3) - v(1, 2)) / T(2)},
      {"Im<a1 a2>", (v(0, 5) + v(1, 4)) / T(2)},
      {"Re<a1+ a2>", (v(0, 4) + v(1, 5)) / T(2)},
      {"Im<a1+ a2>", (v(0, 5) - v(1, 4)) / T(2)},
      {"Im<b+ a2>", (v(2, 5) - v(3, 4)) / T(2)},
      {"Re<b a2>", (v(2, 4) - v(3, 5)) / T(2)},
      {"Im<b a2>", (v(2, 5) + v(3, 4)) / T(2)},
      {"<a1^2>", (v(0, 0) - v(1, 1)) / T(2)},
      {"<b^2>", (v(2, 2) - v(3, 3)) / T(2)},
      {"<a2^2>", (v(4, 4) - v(5, 5)) / T(2)},
      {"XP(a1)", v(0, 1)},
      {"XP(b)", v(2, 3)},
      {"XP(a2)", v(4, 5)},
  };
  for (const auto& [name, value] : discarded) {
    if (abs(value) > tol) {
      std::ostringstream msg;
      msg << "extract_coefficients: moment " << name << " = " << static_cast<double>(value)
          << " should vanish for the interaction dynamics";
      throw NumericalContractError(msg.str());
    }
  }

  NormalCoefficients<T> c;
  c.A = (v(0, 0) + v(1, 1) - T(1)) / T(2);
  c.B = (v(2, 2) + v(3, 3) - T(1)) / T(2);
  c.E = (v(4, 4) + v(5, 5) - T(1)) / T(2);
  c.C = (v(0, 2) - v(1, 3)) / T(2);
  c.F = (v(0, 4) - v(1, 5)) / T(2);
  c.D = -(v(2, 4) + v(3, 5)) / T(2);
  return c;
}

/// Covariance of (X_a1, P_a1, X_b, P_b) after the heterodyne measurement of
/// a₂; independent of the outcome.
template <typename T>
Matrix<T> conditional_matrix(const NormalCoefficients<T>& c) {
  if (!(c.E > T(-1))) throw std::invalid_argument("conditional_matrix: requires E > -1");
  const T e1 = c.E + T(1);
  const T g11 = c.A + T(0.5) - c.F * c.F / e1;
  const T g33 = c.B + T(0.5) - c.D * c.D / e1;
  const T g13 = c.C + c.F * c.D / e1;
  Matrix<T> g = Matrix<T>::Zero(4, 4);
  g(0, 0) = g(1, 1) = g11;
  g(2, 2) = g(3, 3) = g33;
  g(0, 2) = g(2, 0) = g13;
  g(1, 3) = g(3, 1) = -g13;
  return g;
}

/// Bob's output covariance for an input covariance `gamma_in` when the
/// shared state has conditional covariance `gamma_cond`.
template <typename T>
Matrix<T> output_covariance(const Matrix<T>& gamma_in, const Matrix<T>& gamma_cond) {
  if (gamma_in.rows() != 2 || gamma_in.cols() != 2 || gamma_cond.rows() != 4 || gamma_cond.cols() != 4)
    throw std::invalid_argument("output_covariance: expects 2x2 input and 4x4 conditional matrices");
  const auto& g = gamma_cond;
  Matrix<T> out(2, 2);
  out(0, 0) = gamma_in(0, 0) + (g(0, 0) + T(2) * g(0, 2) + g(2, 2));
  out(0, 1) = gamma_in(0, 1) + (g(0, 3) - g(0, 1) + g(2, 3) - g(1, 2));
  out(1, 0) = out(0, 1);
  out(1, 1) = gamma_in(1, 1) + (g(1, 1) - T(2) * g(1, 3) + g(3, 3));
  return out;
}

/// Effective thermal number of the teleported mirror state:
///   n_eff = 1 + A + B + 2C − (F − D)²/(E + 1).
template <typename T>
T cooling_neff(const NormalCoefficients<T>& c) {
  if (!(c.E > T(-1))) throw std::invalid_argument("cooling_neff: requires E > -1");
  const T fd = c.F - c.D;
  return T(1) + c.A + c.B + T(2) * c.C - fd * fd / (c.E + T(1));
}

/// Coherent-state fidelity F = 1/(1 + n_eff). A bracket below −1 is rejected;
/// a bracket in (−1, 0) is rounding noise around a perfect channel and the
/// result is clamped to 1 (see `fidelity_is_clamped`).
template <typename T>
T fidelity_coherent(const NormalCoefficients<T>& c) {
  const T n = cooling_neff(c);
  if (n < T(-1)) throw NumericalContractError("fidelity_coherent: bracket below -1, coefficients unphysical");
  if (n < T(0)) return T(1);
  return T(1) / (T(1) + n);
}

template <typename T>
bool fidelity_is_clamped(const NormalCoefficients<T>& c) {
  return cooling_neff(c) < T(0);
}

/// Same protocol without the heterodyne measurement (a₂ traced out):
/// F = 1/(2 + A + B + 2C).
template <typename T>
T fidelity_no_heterodyne(const NormalCoefficients<T>& c) {
  const T n = T(1) + c.A + c.B + T(2) * c.C;
  if (n < T(-1)) throw NumericalContractError("fidelity_no_heterodyne: bracket below -1, coefficients unphysical");
  if (n < T(0)) return T(1);
  return T(1) / (T(1) + n);
}

/// Sign conventions of the protocol. id bit 0: mixing, bit 1: P feed-forward,
/// bit 2: α-gain sign. id 0 is the convention consistent with the output
/// covariance map above and is the default.
struct SignVariant {
  int mixing = 1;         // +1: X₊/P₋ as above; −1: X₋ = (X_in − X_a1)/√2, P₊ = (P_in + P_a1)/√2
  int p_feedforward = 1;  // Bob adds p·√2·P_meas to P_b; −1 is the literal sign of the printed rule
  int alpha_gain = 1;     // +1: gains that cancel the α-dependence of Bob's mean; −1: negated

  int id() const { return (mixing < 0 ? 1 : 0) | (p_feedforward < 0 ? 2 : 0) | (alpha_gain < 0 ? 4 : 0); }

  static SignVariant from_id(int id) {
    if (id < 0 || id > 7) throw std::invalid_argument("sign variant id must be in 0..7");
    return {(id & 1) ? -1 : 1, (id & 2) ? -1 : 1, (id & 4) ? -1 : 1};
  }

  friend bool operator==(const SignVariant&, const SignVariant&) = default;
};

/// Gains (g_x, g_p) on √2·Re α and √2·Im α. For the default variant both
/// equal −(F − D)/(E + 1): the heterodyne shifts the conditional means of
/// (X_a1, P_a1, X_b, P_b) by (F, −F, −D, −D)/(E+1) per unit outcome, and the
/// gains cancel what the homodyne feed-forward passes on to Bob.
template <typename T>
std::pair<T, T> displacement_gains(const NormalCoefficients<T>& c, SignVariant v = {}) {
  if (!(c.E > T(-1))) throw std::invalid_argument("displacement_gains: requires E > -1");
  const T e1 = c.E + T(1);
  const T m = T(v.mixing);
  const T pm = T(v.mixing * v.p_feedforward);
  const T a = T(v.alpha_gain);
  return {a * (c.D - m * c.F) / e1, a * (c.D - pm * c.F) / e1};
}

/// Gain pair as printed in the protocol description, ((F−D)/(E+1), (F+D)/(E+1)).
/// It does not cancel the outcome dependence of Bob's mean; kept for reports
/// and as a negative control.
template <typename T>
std::pair<T, T> printed_displacement_gains(const NormalCoefficients<T>& c) {
  const T e1 = c.E + T(1);
  return {(c.F - c.D) / e1, (c.F + c.D) / e1};
}

/// Analytic outcome-averaged fidelity for a coherent input under any sign
/// variant (and optionally explicit gains). Built from the conditional matrix
/// and the Gaussian law of α, independently of the closed-form bracket.
template <typename T>
T variant_fidelity(const NormalCoefficients<T>& c, SignVariant v, std::complex<T> alpha_in,
                   std::optional<std::pair<T, T>> gains = std::nullopt) {
  const Matrix<T> g = conditional_matrix(c);
  const T m = T(v.mixing);
  const T p = T(v.p_feedforward);
  Vector<T> ux(4), up(4);
  ux << m, T(0), T(1), T(0);
  up << T(0), -p * m, T(0), T(1);
  const auto [gx, gp] = gains ? *gains : displacement_gains(c, v);
  const T e1 = c.E + T(1);
  const T rx = (m * c.F - c.D) / e1 + gx;
  const T rp = (p * m * c.F - c.D) / e1 + gp;

  Matrix<T> cov(2, 2);
  cov(0, 0) = T(0.5) + ux.dot(g * ux) + e1 * rx * rx;
  cov(1, 1) = T(0.5) + up.dot(g * up) + e1 * rp * rp;
  cov(0, 1) = cov(1, 0) = ux.dot(g * up);
  const auto in = make_coherent<T>(alpha_in);
  Vector<T> mean = in.mean();
  mean(1) *= p;
  return overlap_with_pure_gaussian(in, GaussianState<T>(mean, cov));
}

template <typename T>
struct ProtocolResult {
  T theta_t{0};
  T fidelity{0};
  T fidelity_no_het{0};
  T n_eff{0};
  T gain_x{0};
  T gain_p{0};
  bool clamped = false;
};

/// Everything at one scaled time Θt. For the default variant `fidelity` is
/// the closed-form coherent fidelity; otherwise the variant fidelity at α_in.
template <typename T>
ProtocolResult<T> evaluate_point(const Couplings<T>& c, T nbar, T theta_t, SignVariant v = {},
                                 std::complex<T> alpha_in = {}) {
  const T big_theta = c.big_theta();
  if (!(big_theta > T(0))) throw std::invalid_argument("scaled time needs θ > χ (Θ > 0)");
  if (theta_t < T(0)) throw std::invalid_argument("scaled time must be >= 0");
  const auto coeffs = extract_coefficients(evolve_initial(c, nbar, theta_t / big_theta));
  ProtocolResult<T> r;
  r.theta_t = theta_t;
  r.n_eff = cooling_neff(coeffs);
  r.clamped = fidelity_is_clamped(coeffs);
  r.fidelity = v == SignVariant{} ? fidelity_coherent(coeffs) : variant_fidelity(coeffs, v, alpha_in);
  r.fidelity_no_het = fidelity_no_heterodyne(coeffs);
  std::tie(r.gain_x, r.gain_p) = displacement_gains(coeffs, v);
  return r;
}

template <typename T>
std::vector<ProtocolResult<T>> fidelity_curve(const Couplings<T>& c, T nbar, std::span<const T> theta_t,
                                              SignVariant v = {}, std::complex<T> alpha_in = {},
                                              unsigned threads = 1) {
  for (const T x : theta_t)
    if (x < T(0)) throw std::invalid_argument("fidelity_curve: grid values must be >= 0");
  std::vector<ProtocolResult<T>> out(theta_t.size());
  parallel_for(theta_t.size(), threads, [&](std::size_t i) { out[i] = evaluate_point(c, nbar, theta_t[i], v, alpha_in); });
  return out;
}

template <typename T>
std::vector<ProtocolResult<T>> fidelity_curve(const PhysicalParams<T>& p, T nbar, std::span<const T> theta_t,
                                              SignVariant v = {}, std::complex<T> alpha_in = {},
                                              unsigned threads = 1) {
  return fidelity_curve(couplings_from_params(p), nbar, theta_t, v, alpha_in, threads);
}

}  // namespace mirrorport
