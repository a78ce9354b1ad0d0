#pragma once

// Monte-Carlo simulation of single protocol runs: sampled heterodyne and
// Bell outcomes, Bob's feed-forward displacement, and the overlap of his
// conditional state with the input. Used as an oracle for the closed-form
// fidelity.

#include "mirrorport/measurement.hpp"
#include "mirrorport/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace mirrorport {

/// splitmix64 finaliser, used to decorrelate per-trajectory seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Generator for trajectory `index`: depends only on (seed, index), so serial
/// and parallel runs draw identical ensembles.
inline std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(mix_seed(seed ^ index));
}

template <typename T>
struct TrajectoryRecord {
  std::complex<T> alpha;      // heterodyne outcome on a₂
  T x_plus{0};                // homodyne outcome on the X port
  T p_minus{0};               // homodyne outcome on the P port
  GaussianState<T> out_state; // Bob's mirror mode after displacement
  Vector<T> alpha_mean;       // Bob's output mean averaged over the Bell outcomes, given α
  T overlap{0};
};

template <typename T>
struct FidelityEstimate {
  T mean{0};
  T stderr_{0};
};

/// Balanced beam splitter on modes (0, 1) of a three-mode state:
/// mode 0 → (in + a₁)/√2, mode 1 → (in − a₁)/√2.
template <typename T>
Matrix<T> balanced_mixer(std::size_t n_modes) {
  using std::sqrt;
  Matrix<T> s = Matrix<T>::Identity(2 * n_modes, 2 * n_modes);
  const T h = T(1) / sqrt(T(2));
  for (int q = 0; q < 2; ++q) {
    s(q, q) = h;
    s(q, 2 + q) = h;
    s(2 + q, q) = h;
    s(2 + q, 2 + q) = -h;
  }
  return s;
}

template <typename T>
class TrajectorySimulator {
public:
  TrajectorySimulator(const Couplings<T>& c, T nbar, T t, std::complex<T> alpha_in, SignVariant variant = {},
                      std::optional<std::pair<T, T>> gains = std::nullopt)
      : evolved_(evolve_initial(c, nbar, t)),
        coeffs_(extract_coefficients(evolved_)),
        input_(make_coherent<T>(alpha_in)),
        variant_(variant),
        gains_(gains ? *gains : displacement_gains(coeffs_, variant)) {}

  const GaussianState<T>& evolved() const { return evolved_; }
  const NormalCoefficients<T>& coefficients() const { return coeffs_; }
  std::pair<T, T> gains() const { return gains_; }
  const GaussianState<T>& input() const { return input_; }

  TrajectoryRecord<T> run(std::uint64_t seed, std::uint64_t index) const {
    using std::sqrt;
    auto rng = trajectory_rng(seed, index);
    const T r2 = sqrt(T(2));

    // Heterodyne on a₂ leaves (a₁, b).
    auto het = heterodyne_sample(evolved_, 2, rng);
    // Modes (in, a₁, b), then mix in with a₁.
    const auto mixed = apply_symplectic(tensor(input_, het.posterior), balanced_mixer<T>(3));
    const std::size_t x_port = variant_.mixing > 0 ? 0 : 1;
    const std::size_t p_port = variant_.mixing > 0 ? 1 : 0;
    const QuadratureSelector bell[] = {{x_port, Quadrature::X}, {p_port, Quadrature::P}};
    const Vector<T> y = sample_quadratures<T>(mixed, bell, rng);
    const auto bob = condition_on_quadratures<T>(mixed, bell, y);

    const T p = T(variant_.p_feedforward);
    const T ax = r2 * het.alpha.real() * gains_.first;
    const T ap = r2 * het.alpha.imag() * gains_.second;
    auto out = displace(bob, 0, r2 * y(0) + ax, p * r2 * y(1) + ap);

    // Expected output mean given α: replace the Bell outcomes by their means.
    const Vector<T> ey = mixed.mean()(std::vector<Eigen::Index>{Eigen::Index(2 * x_port), Eigen::Index(2 * p_port + 1)});
    Vector<T> alpha_mean(2);
    alpha_mean << mixed.mean()(4) + r2 * ey(0) + ax, mixed.mean()(5) + p * r2 * ey(1) + ap;

    const T ov = overlap_with_pure_gaussian(input_, out);
    return {het.alpha, y(0), y(1), std::move(out), std::move(alpha_mean), ov};
  }

  /// Outcome-averaged output covariance from the linear input-output map
  ///   X_out = X_in + m X_a1 + X_b + g_x (X_a2 + n_X)
  ///   P_out = p P_in − p m P_a1 + P_b + g_p (P_a2 + n_P)
  /// with (n_X, n_P) the heterodyne vacuum noise; no conditioning involved.
  Matrix<T> ensemble_output_covariance() const {
    Matrix<T> full = Matrix<T>::Zero(10, 10);
    full.topLeftCorner(2, 2) = input_.cov();
    full.block(2, 2, 6, 6) = evolved_.cov();
    full.bottomRightCorner(2, 2) = Matrix<T>::Identity(2, 2) / T(2);
    const T m = T(variant_.mixing);
    const T p = T(variant_.p_feedforward);
    Matrix<T> map = Matrix<T>::Zero(2, 10);
    map(0, 0) = T(1);
    map(0, 2) = m;
    map(0, 4) = T(1);
    map(0, 6) = gains_.first;
    map(0, 8) = gains_.first;
    map(1, 1) = p;
    map(1, 3) = -p * m;
    map(1, 5) = T(1);
    map(1, 7) = gains_.second;
    map(1, 9) = gains_.second;
    return symmetrized<T>(map * full * map.transpose());
  }

private:
  GaussianState<T> evolved_;
  NormalCoefficients<T> coeffs_;
  GaussianState<T> input_;
  SignVariant variant_;
  std::pair<T, T> gains_;
};

template <typename T>
TrajectoryRecord<T> run_trajectory(const Couplings<T>& c, T nbar, T t, std::complex<T> alpha_in, std::uint64_t seed,
                                   SignVariant variant = {}) {
  return TrajectorySimulator<T>(c, nbar, t, alpha_in, variant).run(seed, 0);
}

template <typename T>
std::vector<TrajectoryRecord<T>> run_trajectories(const TrajectorySimulator<T>& sim, std::size_t n_traj,
                                                  std::uint64_t seed, unsigned threads = 1) {
  std::vector<std::optional<TrajectoryRecord<T>>> slots(n_traj);
  parallel_for(n_traj, threads, [&](std::size_t i) { slots[i] = sim.run(seed, i); });
  std::vector<TrajectoryRecord<T>> out;
  out.reserve(n_traj);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Sample mean and standard error of the per-trajectory overlaps.
template <typename T>
FidelityEstimate<T> estimate_fidelity(const TrajectorySimulator<T>& sim, std::size_t n_traj, std::uint64_t seed,
                                      unsigned threads = 1) {
  using std::sqrt;
  if (n_traj < 100) throw std::invalid_argument("estimate_fidelity: need at least 100 trajectories");
  std::vector<T> overlaps(n_traj);
  parallel_for(n_traj, threads, [&](std::size_t i) { overlaps[i] = sim.run(seed, i).overlap; });
  T sum(0);
  for (const T v : overlaps) sum += v;
  const T mean = sum / T(n_traj);
  T ss(0);
  for (const T v : overlaps) ss += (v - mean) * (v - mean);
  const T var = ss / T(n_traj - 1);
  return {mean, sqrt(var / T(n_traj))};
}

template <typename T>
FidelityEstimate<T> estimate_fidelity(const Couplings<T>& c, T nbar, T t, std::complex<T> alpha_in,
                                      std::size_t n_traj, std::uint64_t seed, SignVariant variant = {},
                                      unsigned threads = 1) {
  return estimate_fidelity(TrajectorySimulator<T>(c, nbar, t, alpha_in, variant), n_traj, seed, threads);
}

/// Largest |E[out | α] − in| over the trajectories (max-norm over X, P).
template <typename T>
T mean_transport_check(const TrajectorySimulator<T>& sim, std::size_t n_traj, std::uint64_t seed,
                       unsigned threads = 1) {
  std::vector<T> dev(n_traj);
  const Vector<T>& target = sim.input().mean();
  parallel_for(n_traj, threads, [&](std::size_t i) {
    const auto rec = sim.run(seed, i);
    dev[i] = (rec.alpha_mean - target).cwiseAbs().maxCoeff();
  });
  return dev.empty() ? T(0) : *std::max_element(dev.begin(), dev.end());
}

template <typename T>
T mean_transport_check(const Couplings<T>& c, T nbar, T t, std::complex<T> alpha_in, std::size_t n_traj,
                       std::uint64_t seed, SignVariant variant = {}, unsigned threads = 1) {
  return mean_transport_check(TrajectorySimulator<T>(c, nbar, t, alpha_in, variant), n_traj, seed, threads);
}

/// Fidelity estimate and mean-transport deviation from one pass over the ensemble.
template <typename T>
struct EnsembleSummary {
  FidelityEstimate<T> fidelity;
  T max_mean_deviation{0};
};

template <typename T>
EnsembleSummary<T> summarize_ensemble(const TrajectorySimulator<T>& sim, std::size_t n_traj, std::uint64_t seed,
                                      unsigned threads = 1) {
  using std::sqrt;
  if (n_traj < 100) throw std::invalid_argument("summarize_ensemble: need at least 100 trajectories");
  std::vector<T> overlaps(n_traj), dev(n_traj);
  const Vector<T>& target = sim.input().mean();
  parallel_for(n_traj, threads, [&](std::size_t i) {
    const auto rec = sim.run(seed, i);
    overlaps[i] = rec.overlap;
    dev[i] = (rec.alpha_mean - target).cwiseAbs().maxCoeff();
  });
  T sum(0);
  for (const T v : overlaps) sum += v;
  const T mean = sum / T(n_traj);
  T ss(0);
  for (const T v : overlaps) ss += (v - mean) * (v - mean);
  EnsembleSummary<T> out;
  out.fidelity = {mean, sqrt(ss / T(n_traj - 1) / T(n_traj))};
  out.max_mean_deviation = *std::max_element(dev.begin(), dev.end());
  return out;
}

}  // namespace mirrorport
