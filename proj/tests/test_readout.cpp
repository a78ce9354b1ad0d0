#include "mirrorport/readout.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mirrorport;
using L = long double;

namespace {

const L kPi = std::acos(L(-1));

Couplings<L> reference() { return couplings_from_params(PhysicalParams<L>{}); }

}  // namespace

TEST(Readout, IdentityAtZero) {
  for (int sigma : {1, -1}) {
    const auto r = readout_coefficients(reference(), 0.0L, sigma);
    EXPECT_NEAR(r.c_b, 0.0L, 1e-12L);
    EXPECT_NEAR(r.c_a1, 1.0L, 1e-12L);
    EXPECT_NEAR(r.c_a2, -1.0L, 1e-12L);
  }
}

TEST(Readout, QuarterPeriodMirrorCoefficient) {
  const auto c = reference();
  const L t = kPi / 2 / c.big_theta();
  const L expected = std::sqrt(c.gap) / (c.theta + c.chi);  // √((θ−χ)/(θ+χ))
  EXPECT_NEAR(readout_coefficients(c, t, 1).c_b, -expected, 1e-9L * expected);
  // σ = −1: (χ + θ)/Θ
  EXPECT_NEAR(readout_coefficients(c, t, -1).c_b, (c.chi + c.theta) / c.big_theta(), 1e-6L);
}

TEST(Readout, Periodic) {
  const auto c = reference();
  const L period = 2 * kPi / c.big_theta();
  for (L x : {0.3L, 2.0L, 5.0L}) {
    const L t = x / c.big_theta();
    const auto a = readout_coefficients(c, t);
    const auto b = readout_coefficients(c, t + period);
    const L scale = std::max({L(1), std::abs(a.c_b), std::abs(a.c_a1), std::abs(a.c_a2)});
    EXPECT_NEAR(a.c_b, b.c_b, 1e-7L * scale);
    EXPECT_NEAR(a.c_a1, b.c_a1, 1e-7L * scale);
    EXPECT_NEAR(a.c_a2, b.c_a2, 1e-7L * scale);
    const auto ra = printed_formula_residual(c, t);
    const auto rb = printed_formula_residual(c, t + period);
    EXPECT_NEAR(ra.c_a2, rb.c_a2, 1e-7L * scale);
  }
}

TEST(Readout, ClosedFormAgreement) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 2);
  for (int i = 0; i < 50; ++i) {
    const L chi = u(rng);
    const auto c = make_couplings<L>(chi, chi + L(u(rng)));
    const L t = 3 * u(rng);
    for (int sigma : {1, -1}) {
      const auto a = readout_coefficients(c, t, sigma);
      const auto b = ladder_readout_from_propagator(closed_form_propagator(c, t, sigma));
      EXPECT_NEAR(a.c_b, b.c_b, 1e-10L);
      EXPECT_NEAR(a.c_a1, b.c_a1, 1e-10L);
      EXPECT_NEAR(a.c_a2, b.c_a2, 1e-10L);
      // the derived closed form
      const auto k = flow_kernel(c.gap, t);
      const L tau = sigma * c.theta;
      EXPECT_NEAR(a.c_b, (chi - tau) * k.s, 1e-10L);
      EXPECT_NEAR(a.c_a1, 1 + chi * (chi - tau) * k.k, 1e-10L);
      EXPECT_NEAR(a.c_a2, -1 + tau * (tau - chi) * k.k, 1e-10L);
    }
  }
}

TEST(Readout, QuadraturePictureConsistency) {
  // ⟨(a₁ − a₂†)(t)⟩ for a displaced initial state equals the coefficients
  // applied to the initial ladder means
  const auto c = make_couplings<L>(0.7L, 1.2L);
  const L t = 1.9L;
  const std::complex<L> m1(0.3L, -0.4L), mb(1.1L, 0.2L), m2(-0.5L, 0.9L);
  auto s = tensor(tensor(make_coherent<L>(m1), make_coherent<L>(mb)), make_coherent<L>(m2));
  const auto out = apply_symplectic(s, propagator(c, t));
  const L r2 = std::sqrt(L(2));
  const std::complex<L> a1(out.mean()(0) / r2, out.mean()(1) / r2);
  const std::complex<L> a2(out.mean()(4) / r2, out.mean()(5) / r2);
  const auto k = readout_coefficients(c, t);
  const std::complex<L> lhs = a1 - std::conj(a2);
  const std::complex<L> rhs = k.c_b * std::conj(mb) + k.c_a1 * m1 + k.c_a2 * std::conj(m2);
  EXPECT_NEAR(lhs.real(), rhs.real(), 1e-12L);
  EXPECT_NEAR(lhs.imag(), rhs.imag(), 1e-12L);
}

TEST(PrintedFormula, ResidualsAtZero) {
  const auto c = reference();
  const auto p = printed_readout_coefficients(c, 0.0L);
  EXPECT_NEAR(p.c_a1, 1.0L, 1e-15L);
  EXPECT_NEAR(p.c_a2, (c.theta - c.chi) / (c.theta + c.chi), 1e-12L);
  const auto r = printed_formula_residual(c, 0.0L);
  EXPECT_NEAR(r.c_b, 0.0L, 1e-15L);
  EXPECT_NEAR(r.c_a1, 0.0L, 1e-15L);
  EXPECT_NEAR(r.c_a2, 1.0L, 1e-6L);
}

TEST(PrintedFormula, LiteralEvaluationAgrees) {
  // the bracket as printed, evaluated naively on moderate couplings
  const auto c = make_couplings<L>(0.6L, 1.0L);
  const L th = c.big_theta();
  for (L t : {0.2L, 1.4L, 3.3L}) {
    const L co = std::cos(th * t);
    const L chi = c.chi, theta = c.theta;
    const L a1 = (theta * theta - chi * chi * co - chi * theta + chi * theta * co) / (th * th);
    const L a2 = -(chi * theta + chi * theta * co - chi * chi - theta * theta * co) / (th * th);
    const auto p = printed_readout_coefficients(c, t);
    EXPECT_NEAR(p.c_b, (chi + theta) * std::sin(th * t) / th, 1e-14L);
    EXPECT_NEAR(p.c_a1, a1, 1e-14L);
    EXPECT_NEAR(p.c_a2, a2, 1e-14L);
  }
}

TEST(PrintedFormula, MirrorTermMatchesFlippedFlow) {
  const auto c = reference();
  for (L x : {0.5L, 2.5L}) {
    const L t = x / c.big_theta();
    EXPECT_NEAR(printed_readout_coefficients(c, t).c_b, readout_coefficients(c, t, -1).c_b, 1e-6L);
    EXPECT_NEAR(printed_readout_coefficients(c, t).c_a1, readout_coefficients(c, t, 1).c_a1,
                1e-9L * std::abs(readout_coefficients(c, t, 1).c_a1));
  }
}

TEST(Dominance, ReferenceMirror) {
  const L ratio = dominance_ratio(reference());
  EXPECT_NEAR(ratio, 1.8e-4L, 0.2L * 1.8e-4L);
  EXPECT_NEAR(ratio, 1.7678e-4L, 1e-8L);
}

TEST(Dominance, WithoutParametricCouplingAndPowerInvariance) {
  EXPECT_NEAR(dominance_ratio(make_couplings<L>(0.0L, 2.0L)), 1.0L, 1e-15L);
  PhysicalParams<L> p;
  const L a = dominance_ratio(couplings_from_params(p));
  p.power_w *= 9;
  EXPECT_NEAR(dominance_ratio(couplings_from_params(p)) / a, 1.0L, 1e-15L);
  EXPECT_THROW(dominance_ratio(make_couplings<L>(2.0L, 1.0L)), std::invalid_argument);
}
