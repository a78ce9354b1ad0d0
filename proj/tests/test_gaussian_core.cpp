#include "mirrorport/figures_of_merit.hpp"
#include "mirrorport/measurement.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mirrorport;
using Vec = Vector<double>;
using Mat = Matrix<double>;

namespace {

Mat two_mode_squeezer(double r) {
  Mat s = Mat::Zero(4, 4);
  const double c = std::cosh(r), h = std::sinh(r);
  s(0, 0) = s(1, 1) = s(2, 2) = s(3, 3) = c;
  s(0, 2) = s(2, 0) = h;
  s(1, 3) = s(3, 1) = -h;
  return s;
}

Mat rotation(double phi) {
  Mat s(2, 2);
  s << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
  return s;
}

GaussianState<double> tmsv(double r) { return apply_symplectic(make_vacuum<double>(2), two_mode_squeezer(r)); }

}  // namespace

TEST(Vacuum, SingleModeConvention) {
  const auto v = make_vacuum<double>(1);
  EXPECT_EQ(v.n_modes(), 1u);
  EXPECT_TRUE(v.mean().isZero());
  EXPECT_TRUE(v.cov().isApprox(0.5 * Mat::Identity(2, 2)));
}

TEST(Vacuum, ThreeModes) { EXPECT_TRUE(make_vacuum<double>(3).cov().isApprox(0.5 * Mat::Identity(6, 6))); }

TEST(Vacuum, PhysicalAndZeroRejected) {
  EXPECT_TRUE(is_physical(make_vacuum<double>(2)));
  EXPECT_THROW(make_vacuum<double>(0), std::invalid_argument);
}

TEST(Thermal, Values) {
  EXPECT_TRUE(make_thermal(0.0).cov().isApprox(make_vacuum<double>(1).cov()));
  EXPECT_TRUE(make_thermal(1.0).cov().isApprox(1.5 * Mat::Identity(2, 2)));
  const auto nu = symplectic_eigenvalues(make_thermal(1000.0).cov());
  ASSERT_EQ(nu.size(), 1u);
  EXPECT_NEAR(nu[0], 1000.5, 1e-9);
  EXPECT_THROW(make_thermal(-0.1), std::invalid_argument);
}

TEST(Coherent, MeanConvention) {
  EXPECT_TRUE(make_coherent(std::complex<double>(0, 0)).mean().isZero());
  const auto one = make_coherent(std::complex<double>(1, 0));
  EXPECT_NEAR(one.mean()(0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(one.mean()(1), 0.0, 1e-15);
  const auto i = make_coherent(std::complex<double>(0, 1));
  EXPECT_NEAR(i.mean()(0), 0.0, 1e-15);
  EXPECT_NEAR(i.mean()(1), std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(one.cov().isApprox(0.5 * Mat::Identity(2, 2)));
}

TEST(Tensor, BlockStructure) {
  EXPECT_TRUE(tensor(make_vacuum<double>(1), make_vacuum<double>(1)).cov().isApprox(make_vacuum<double>(2).cov()));
  const auto s = tensor(make_thermal(3.0), make_vacuum<double>(1));
  Vec d(4);
  d << 3.5, 3.5, 0.5, 0.5;
  EXPECT_TRUE(s.cov().isApprox(Mat(d.asDiagonal())));
  EXPECT_TRUE(is_physical(s));
  const auto m = tensor(make_coherent(std::complex<double>(1, 2)), make_thermal(2.0));
  EXPECT_NEAR(m.mean()(1), 2 * std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(is_physical(m));
}

TEST(Displace, MatchesCoherentAndKeepsCovariance) {
  const auto v = make_vacuum<double>(1);
  const auto d = displace(v, 0, std::sqrt(2.0), 0.0);
  const auto c = make_coherent(std::complex<double>(1, 0));
  EXPECT_TRUE(d.mean().isApprox(c.mean()));
  EXPECT_TRUE(d.cov() == v.cov());

  const auto s = tensor(make_thermal(2.0), make_vacuum<double>(1));
  const auto ab = displace(displace(s, 1, 0.3, -0.2), 1, -1.1, 0.7);
  const auto ba = displace(displace(s, 1, -1.1, 0.7), 1, 0.3, -0.2);
  EXPECT_TRUE(ab.mean().isApprox(ba.mean()));
  EXPECT_NEAR(ab.mean()(2), -0.8, 1e-15);
  EXPECT_NEAR(ab.mean()(3), 0.5, 1e-15);
  EXPECT_TRUE(ab.cov() == s.cov());
  EXPECT_THROW(displace(s, 2, 0.0, 0.0), std::out_of_range);
}

TEST(ApplySymplectic, IdentityRotationSqueezing) {
  const auto s = tensor(make_thermal(2.0), make_coherent(std::complex<double>(0.5, -1)));
  const auto same = apply_symplectic(s, Mat(Mat::Identity(4, 4)));
  EXPECT_TRUE(same.mean().isApprox(s.mean()));
  EXPECT_TRUE(same.cov().isApprox(s.cov()));

  const auto rot = apply_symplectic(make_vacuum<double>(1), rotation(0.7));
  EXPECT_TRUE(rot.cov().isApprox(make_vacuum<double>(1).cov(), 1e-14));

  const auto sq = tmsv(0.8);
  for (double nu : symplectic_eigenvalues(sq.cov())) EXPECT_NEAR(nu, 0.5, 1e-9);
  EXPECT_TRUE(is_pure(sq));
}

TEST(ApplySymplectic, RejectsNonSymplectic) {
  Mat bad = Mat::Identity(2, 2);
  bad(0, 0) = 2.0;
  try {
    apply_symplectic(make_vacuum<double>(1), bad);
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("defect"), std::string::npos);
  }
}

TEST(ApplySymplectic, PreservesSymplecticEigenvalues) {
  const auto s = tensor(make_thermal(0.7), make_thermal(4.0));
  Mat m = two_mode_squeezer(0.4);
  Mat r = Mat::Identity(4, 4);
  r.block(0, 0, 2, 2) = rotation(0.3);
  const auto out = apply_symplectic(s, Mat(r * m));
  const auto a = symplectic_eigenvalues(s.cov());
  const auto b = symplectic_eigenvalues(out.cov());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
}

TEST(PartialTrace, KeepsSubblocks) {
  const auto s = tensor(tensor(make_vacuum<double>(1), make_thermal(5.0)), make_vacuum<double>(1));
  const auto all = partial_trace(s, {0, 1, 2});
  EXPECT_TRUE(all.cov().isApprox(s.cov()));
  const auto ab = partial_trace(s, {0, 1});
  Vec d(4);
  d << 0.5, 0.5, 5.5, 5.5;
  EXPECT_TRUE(ab.cov().isApprox(Mat(d.asDiagonal())));
  EXPECT_TRUE(is_physical(partial_trace(tmsv(1.2), {1})));
  EXPECT_THROW(partial_trace(s, {}), std::invalid_argument);
  EXPECT_THROW(partial_trace(s, {3}), std::out_of_range);
}

TEST(Heterodyne, ProductStateLeavesRestUnchanged) {
  const auto s = tensor(make_thermal(2.0), make_coherent(std::complex<double>(1, 1)));
  const auto post = heterodyne_condition(s, 1, std::complex<double>(-3, 2));
  EXPECT_TRUE(post.cov().isApprox(make_thermal(2.0).cov()));
  EXPECT_TRUE(post.mean().isZero());
}

TEST(Heterodyne, PosteriorCovarianceIndependentOfOutcome) {
  const auto s = tmsv(0.9);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 3);
  const Mat ref = heterodyne_condition(s, 0, std::complex<double>(0, 0)).cov();
  for (int i = 0; i < 10; ++i) {
    const auto p = heterodyne_condition(s, 0, std::complex<double>(n(rng), n(rng)));
    EXPECT_LT((p.cov() - ref).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Heterodyne, FormulaAgainstHandCalculation) {
  // two-mode squeezed vacuum: V_aa = V_bb = c/2 I, V_ab = s/2 Z
  const double r = 0.6, c = std::cosh(2 * r), sh = std::sinh(2 * r);
  const auto post = heterodyne_condition(tmsv(r), 0, std::complex<double>(0.4, -0.3));
  const double var = c / 2 - (sh / 2) * (sh / 2) / (c / 2 + 0.5);
  EXPECT_NEAR(post.cov()(0, 0), var, 1e-12);
  EXPECT_NEAR(post.cov()(1, 1), var, 1e-12);
  const double gain = (sh / 2) / (c / 2 + 0.5);
  EXPECT_NEAR(post.mean()(0), gain * std::sqrt(2.0) * 0.4, 1e-12);
  EXPECT_NEAR(post.mean()(1), -gain * std::sqrt(2.0) * -0.3, 1e-12);
}

TEST(Heterodyne, SamplingDeterministicAndConsistent) {
  const auto s = tmsv(0.5);
  std::mt19937_64 r1(11), r2(11);
  const auto a = heterodyne_sample(s, 1, r1);
  const auto b = heterodyne_sample(s, 1, r2);
  EXPECT_EQ(a.alpha, b.alpha);
  const auto direct = heterodyne_condition(s, 1, a.alpha);
  EXPECT_TRUE(a.posterior.mean().isApprox(direct.mean()));
  EXPECT_TRUE(a.posterior.cov().isApprox(direct.cov()));
}

TEST(Heterodyne, VacuumOutcomeCovarianceIsIdentity) {
  const auto v = make_vacuum<double>(2);
  std::mt19937_64 rng(2024);
  const int n = 100000;
  double sxx = 0, spp = 0, sxp = 0;
  for (int i = 0; i < n; ++i) {
    const auto a = heterodyne_sample(v, 0, rng).alpha;
    const double x = std::sqrt(2.0) * a.real(), p = std::sqrt(2.0) * a.imag();
    sxx += x * x;
    spp += p * p;
    sxp += x * p;
  }
  // variance of a sample second moment of a unit Gaussian is 2 (diagonal) or 1 (cross)
  const double se_d = std::sqrt(2.0 / n), se_o = std::sqrt(1.0 / n);
  EXPECT_NEAR(sxx / n, 1.0, 3 * se_d);
  EXPECT_NEAR(spp / n, 1.0, 3 * se_d);
  EXPECT_NEAR(sxp / n, 0.0, 3 * se_o);
}

TEST(Heterodyne, LawOfTotalCovariance) {
  auto s = tensor(tmsv(0.7), make_vacuum<double>(1));
  s = displace(s, 1, 0.4, -0.9);
  const Mat prior = partial_trace(s, {1}).cov();
  const Vec prior_mean = partial_trace(s, {1}).mean();
  std::mt19937_64 rng(77);
  const int n = 100000;
  Mat acc = Mat::Zero(2, 2);
  Vec mean_acc = Vec::Zero(2);
  std::vector<Vec> means;
  means.reserve(n);
  Mat post_cov;
  for (int i = 0; i < n; ++i) {
    const auto h = heterodyne_sample(s, 0, rng);
    const Vec m = partial_trace(h.posterior, {0}).mean();
    post_cov = partial_trace(h.posterior, {0}).cov();
    means.push_back(m);
    mean_acc += m;
  }
  mean_acc /= n;
  for (const auto& m : means) acc += (m - mean_acc) * (m - mean_acc).transpose();
  acc /= n - 1;
  const Mat total = acc + post_cov;
  // per-entry standard error of a sample covariance of the posterior means
  const Mat explained = prior - post_cov;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt((explained(i, i) * explained(j, j) + explained(i, j) * explained(i, j)) / n);
      EXPECT_NEAR(total(i, j), prior(i, j), 3 * se + 1e-12) << i << "," << j;
    }
  EXPECT_NEAR(mean_acc(0), prior_mean(0), 3 * std::sqrt(explained(0, 0) / n));
}

TEST(Homodyne, ProductStateSpectators) {
  const auto s = tensor(make_thermal(1.0), make_vacuum<double>(1));
  const auto post = homodyne_condition(s, 1, Quadrature::X, 0.8);
  EXPECT_EQ(post.n_modes(), 1u);
  EXPECT_TRUE(post.cov().isApprox(make_thermal(1.0).cov()));
}

TEST(Homodyne, EprCollapse) {
  const auto s = tmsv(1.0);
  const double marginal = s.cov()(2, 2);
  const auto post = homodyne_condition(s, 0, Quadrature::X, 0.3);
  EXPECT_LT(post.cov()(0, 0), marginal);
  EXPECT_NEAR(post.cov()(0, 0), 0.5 / std::cosh(2.0), 1e-12);
  EXPECT_NEAR(post.cov()(1, 1), marginal, 1e-12);
}

TEST(Homodyne, DegenerateVarianceHandled) {
  // infinitely squeezed X on mode 0 (not physical, but exercises the pseudo-inverse)
  Mat cov = 0.5 * Mat::Identity(4, 4);
  cov(0, 0) = 0.0;
  cov(1, 1) = 10.0;
  const GaussianState<double> s(Vec::Zero(4), cov);
  EXPECT_TRUE(is_degenerate_homodyne(s, 0, Quadrature::X));
  EXPECT_FALSE(is_degenerate_homodyne(s, 0, Quadrature::P));
  const auto post = homodyne_condition(s, 0, Quadrature::X, 0.0);
  EXPECT_TRUE(post.cov().allFinite());
  EXPECT_TRUE(post.cov().isApprox(0.5 * Mat::Identity(2, 2)));
}

TEST(Homodyne, RepeatedConditioningIdempotent) {
  // the measured mode is consumed, so "again" means the same record through
  // the joint-measurement entry point, then a measurement that carries no
  // further information about the survivors
  const auto s = tensor(tmsv(0.8), make_thermal(0.5));
  const auto once = homodyne_condition(s, 0, Quadrature::X, 0.2);
  const QuadratureSelector sel[] = {{0, Quadrature::X}};
  Vec v(1);
  v << 0.2;
  const auto again = condition_on_quadratures<double>(s, sel, v);
  EXPECT_TRUE(once.cov().isApprox(again.cov()));
  const auto twice = homodyne_condition(tensor(once, make_vacuum<double>(1)), 2, Quadrature::X, 0.0);
  EXPECT_TRUE(twice.cov().isApprox(once.cov()));
}

TEST(Homodyne, JointMeasurementOfCommutingPair) {
  const auto s = tensor(tmsv(0.5), make_vacuum<double>(1));
  const QuadratureSelector sel[] = {{0, Quadrature::X}, {2, Quadrature::P}};
  Vec v(2);
  v << 0.1, -0.2;
  const auto post = condition_on_quadratures<double>(s, sel, v);
  EXPECT_EQ(post.n_modes(), 1u);
  const QuadratureSelector same_mode[] = {{0, Quadrature::X}, {0, Quadrature::P}};
  EXPECT_THROW(condition_on_quadratures<double>(s, same_mode, v), std::invalid_argument);
}

TEST(Overlap, IdenticalAddedNoiseAndFar) {
  const auto c = make_coherent(std::complex<double>(0.3, -1.2));
  EXPECT_NEAR(overlap_with_pure_gaussian(c, c), 1.0, 1e-14);
  for (double n : {0.0, 0.5, 1.0, 3.0}) {
    const GaussianState<double> noisy(c.mean(), c.cov() + n * Mat::Identity(2, 2));
    EXPECT_NEAR(overlap_with_pure_gaussian(c, noisy), 1.0 / (1.0 + n), 1e-14);
  }
  const auto far = make_coherent(std::complex<double>(10, 0));
  EXPECT_LT(overlap_with_pure_gaussian(c, far), 1e-10);
}

TEST(Overlap, SymmetricForPureStatesAndRejectsMixedReference) {
  const auto a = make_coherent(std::complex<double>(0.2, 0.1));
  const auto b = apply_symplectic(make_coherent(std::complex<double>(-0.4, 0.3)), rotation(0.4));
  EXPECT_NEAR(overlap_with_pure_gaussian(a, b), overlap_with_pure_gaussian(b, a), 1e-14);
  EXPECT_LT(overlap_with_pure_gaussian(a, b), 1.0);
  EXPECT_THROW(overlap_with_pure_gaussian(make_thermal(1.0), a), std::invalid_argument);
}

TEST(LogNegativity, Values) {
  EXPECT_NEAR(log_negativity(make_vacuum<double>(2)), 0.0, 1e-12);
  EXPECT_NEAR(log_negativity(tensor(make_thermal(1.0), make_thermal(7.0))), 0.0, 1e-12);
  for (double r : {0.1, 0.5, 1.3}) EXPECT_NEAR(log_negativity(tmsv(r)), 2 * r / std::log(2.0), 1e-9);
}

TEST(Physicality, DetectsUnphysicalCovariance) {
  EXPECT_FALSE(is_physical<double>(Mat(0.3 * Mat::Identity(2, 2))));
  Mat squeezed(2, 2);
  squeezed << 0.1, 0, 0, 2.5;
  EXPECT_TRUE(is_physical<double>(squeezed));
  EXPECT_THROW(GaussianState<double>(Vec::Zero(2), (Mat(2, 2) << 1, 0.5, 0, 1).finished()), std::invalid_argument);
}
