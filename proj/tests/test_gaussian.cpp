#include <gtest/gtest.h>

#include <cmath>

#include "mubcv/error.hpp"
#include "mubcv/gaussian.hpp"
#include "mubcv/quadrature.hpp"
#include "oracles.hpp"

using namespace mubcv;

namespace {

constexpr double kPi = oracle::kPi;

GaussianState single(double vx, double vp, double cxp, double mx = 0, double mp = 0) {
  Eigen::VectorXd mean(2);
  mean << mx, mp;
  Eigen::MatrixXd cov(2, 2);
  cov << vx, cxp, cxp, vp;
  return GaussianState(mean, cov);
}

double cross(const GaussianState& s) { return s.cov()(0, 1); }

}  // namespace

TEST(GaussianState, ConstructionValidation) {
  EXPECT_THROW(GaussianState(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)),
               InvalidInput);
  EXPECT_THROW(GaussianState(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(4, 4)),
               InvalidInput);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.1, 0.2, 1;
  EXPECT_THROW(GaussianState(Eigen::VectorXd::Zero(2), asym), InvalidInput);
  Eigen::MatrixXd neg(2, 2);
  neg << -1, 0, 0, 1;
  EXPECT_THROW(GaussianState(Eigen::VectorXd::Zero(2), neg), InvalidInput);
  Eigen::MatrixXd nan_cov(2, 2);
  nan_cov << std::nan(""), 0, 0, 1;
  EXPECT_THROW(GaussianState(Eigen::VectorXd::Zero(2), nan_cov), InvalidInput);
  // Non-physical covariances are representable.
  EXPECT_NO_THROW(GaussianState::diagonal(0.1, 0.1));
  EXPECT_FALSE(GaussianState::diagonal(0.1, 0.1).is_physical());
}

TEST(GaussianState, VacuumIsPure) {
  const auto v = GaussianState::vacuum(1).symplectic_eigenvalues();
  ASSERT_EQ(v.size(), 1);
  EXPECT_DOUBLE_EQ(v[0], 0.5);
  const auto v3 = GaussianState::vacuum(3).symplectic_eigenvalues();
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(v3[i], 0.5, 1e-15);
  EXPECT_TRUE(GaussianState::vacuum(3).is_physical());
}

TEST(GaussianState, SymplecticEigenvalueMatchesDeterminant) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = random_physical_state(1, seed);
    const double expect =
        oracle::symplectic_eigenvalue(s.cov()(0, 0), s.cov()(1, 1), s.cov()(0, 1));
    EXPECT_NEAR(s.symplectic_eigenvalues()[0], expect, 1e-10);
  }
}

TEST(Observable, MeanExamples) {
  const auto x = LinearObservable::quadrature(1, 0, 0.0);
  EXPECT_DOUBLE_EQ(observable_mean(GaussianState::vacuum(1), x), 0.0);
  EXPECT_DOUBLE_EQ(observable_mean(single(0.5, 0.5, 0, 3, 0), x), 3.0);
  const auto r = LinearObservable::quadrature(1, 0, 2 * kPi / 3);
  EXPECT_NEAR(observable_mean(single(0.5, 0.5, 0, 1, 2), r), -0.5 + std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(observable_mean(single(0.5, 0.5, 0, 1, 2), r), 1.2321, 1e-4);
}

TEST(Observable, DimensionMismatch) {
  const auto x2 = LinearObservable::quadrature(2, 1, 0.0);
  EXPECT_THROW(observable_mean(GaussianState::vacuum(1), x2), InvalidInput);
  EXPECT_THROW(observable_variance(GaussianState::vacuum(1), x2), InvalidInput);
  EXPECT_THROW(LinearObservable(Eigen::VectorXd::Zero(2)), InvalidInput);
  EXPECT_THROW(LinearObservable::quadrature(1, 1, 0.0), InvalidInput);
}

TEST(Observable, VarianceExamples) {
  const auto r = LinearObservable::quadrature(1, 0, 2 * kPi / 3);
  EXPECT_NEAR(observable_variance(GaussianState::vacuum(1), r), 0.5, 1e-15);
  const auto x = LinearObservable::quadrature(1, 0, 0.0);
  EXPECT_DOUBLE_EQ(observable_variance(GaussianState::diagonal(2.0, 0.125), x), 2.0);
}

TEST(Observable, VarianceMatchesHandExpansion) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto s = random_physical_state(1, seed);
    for (double th : {2 * kPi / 3, 4 * kPi / 3, 0.37}) {
      const auto q = LinearObservable::quadrature(1, 0, th);
      EXPECT_NEAR(observable_variance(s, q),
                  oracle::quadrature_variance(s.cov()(0, 0), s.cov()(1, 1), cross(s), th), 1e-12);
    }
  }
}

TEST(Observable, RSProductIdentity) {
  // (dr)^2 (ds)^2 = [(dx)^2 + 3 (dp)^2]^2 / 16 - 3/16 (2 cov_xp)^2.
  const auto r = LinearObservable::quadrature(1, 0, 2 * kPi / 3);
  const auto s = LinearObservable::quadrature(1, 0, 4 * kPi / 3);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto st = random_physical_state(1, seed);
    const double vx = st.cov()(0, 0), vp = st.cov()(1, 1), c2 = 2 * cross(st);
    const double lhs = observable_variance(st, r) * observable_variance(st, s);
    const double rhs = (vx + 3 * vp) * (vx + 3 * vp) / 16 - 3.0 / 16 * c2 * c2;
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Observable, CommutatorFromSymplecticProduct) {
  const auto x = LinearObservable::quadrature(1, 0, 0.0);
  const auto p = LinearObservable::quadrature(1, 0, kPi / 2);
  EXPECT_NEAR(symplectic_product(x, p), 1.0, 1e-15);
  EXPECT_NEAR(symplectic_product(p, x), -1.0, 1e-15);
  const auto r = LinearObservable::quadrature(1, 0, 2 * kPi / 3);
  EXPECT_NEAR(std::abs(symplectic_product(x, r)), commutator_magnitude(0, 2 * kPi / 3), 1e-15);
}

TEST(RotateMode, Examples) {
  const auto vac = rotate_mode(GaussianState::vacuum(1), 0, 1.234);
  EXPECT_TRUE(vac.cov().isApprox(GaussianState::vacuum(1).cov(), 1e-15));
  const double eta = 2.0, xi = 0.125;
  const auto rot = rotate_mode(GaussianState::diagonal(eta, xi), 0, 2 * kPi / 3);
  EXPECT_NEAR(rot.cov()(0, 0), 0.25 * eta + 0.75 * xi, 1e-15);
  const auto s = random_physical_state(2, 9);
  const auto back = rotate_mode(rotate_mode(s, 1, 0.8), 1, -0.8);
  EXPECT_TRUE(back.cov().isApprox(s.cov(), 1e-12));
  EXPECT_TRUE(back.mean().isApprox(s.mean(), 1e-12));
  EXPECT_THROW(rotate_mode(s, 2, 0.1), InvalidInput);
}

TEST(RotateMode, RotatedXIsOldQuadrature) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = random_physical_state(1, seed);
    const double th = 0.05 * static_cast<double>(seed);
    const auto rot = rotate_mode(s, 0, th);
    EXPECT_NEAR(rot.cov()(0, 0), oracle::quadrature_variance(s.cov()(0, 0), s.cov()(1, 1), cross(s), th),
                1e-12);
    EXPECT_NEAR(rot.mean()[0], std::cos(th) * s.mean()[0] + std::sin(th) * s.mean()[1], 1e-12);
  }
}

TEST(RotateMode, PreservesSymplecticEigenvalues) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = random_physical_state(2, seed);
    const auto r = rotate_mode(rotate_mode(s, 0, 0.3 * seed), 1, -1.1);
    EXPECT_TRUE(r.symplectic_eigenvalues().isApprox(s.symplectic_eigenvalues(), 1e-10));
    EXPECT_TRUE(r.is_physical());
  }
}

TEST(SampleWigner, VacuumVariance) {
  const auto pts = sample_wigner(GaussianState::vacuum(1), 1000000, 42);
  ASSERT_EQ(pts.rows(), 1000000);
  ASSERT_EQ(pts.cols(), 2);
  const double mean = pts.col(0).mean();
  const double var = (pts.col(0).array() - mean).square().mean();
  EXPECT_GE(var, 0.498);
  EXPECT_LE(var, 0.502);
}

TEST(SampleWigner, Deterministic) {
  const auto s = random_physical_state(2, 4);
  EXPECT_EQ(sample_wigner(s, 1000, 7), sample_wigner(s, 1000, 7));
  EXPECT_NE(sample_wigner(s, 1000, 7), sample_wigner(s, 1000, 8));
}

TEST(SampleWigner, ObservableVarianceWithinFiveStandardErrors) {
  const std::size_t n = 200000;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = random_physical_state(2, 100 + seed);
    const auto pts = sample_wigner(s, n, seed);
    Eigen::VectorXd c(4);
    c << 0.3, -1.0, 0.7, 0.2;
    const LinearObservable obs(c);
    const Eigen::VectorXd v = pts * c;
    const double mean = v.mean();
    const double var = (v.array() - mean).square().mean();
    const double m4 = (v.array() - mean).pow(4).mean();
    const double se = std::sqrt((m4 - var * var) / n);
    EXPECT_NEAR(var, observable_variance(s, obs), 5 * se);
    EXPECT_NEAR(mean, observable_mean(s, obs), 5 * std::sqrt(var / n));
  }
}

TEST(SampleWigner, RejectsNonPhysical) {
  EXPECT_THROW(sample_wigner(GaussianState::diagonal(0.1, 0.1), 10, 1), InvalidInput);
  EXPECT_THROW(sample_wigner(GaussianState::vacuum(1), 0, 1), InvalidInput);
}

TEST(RandomState, AlwaysPhysical) {
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto s = random_physical_state(1, seed);
    ASSERT_TRUE(s.is_physical()) << seed;
    ASSERT_GE(s.cov()(0, 0) * s.cov()(1, 1), 0.25 - 1e-9) << seed;
  }
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    ASSERT_TRUE(random_physical_state(2, seed).is_physical()) << seed;
    ASSERT_TRUE(random_physical_state(3, seed).is_physical()) << seed;
  }
}

TEST(RandomState, ZeroSqueezeIsThermalDiagonal) {
  RandomStateOptions opts;
  opts.max_squeeze = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = random_physical_state(1, seed, opts);
    EXPECT_NEAR(s.cov()(0, 1), 0.0, 1e-12);
    EXPECT_NEAR(s.cov()(0, 0), s.cov()(1, 1), 1e-12);
    EXPECT_GE(s.cov()(0, 0), 0.5 - 1e-12);
  }
}

TEST(RandomState, ProductStateIsBlockDiagonal) {
  const auto s = random_product_state(2, 5);
  EXPECT_EQ(s.cov().block(0, 2, 2, 2), Eigen::MatrixXd::Zero(2, 2));
  EXPECT_TRUE(s.is_physical());
  EXPECT_EQ(random_product_state(2, 5).cov(), s.cov());
}

TEST(GaussianState, ReducedModeAndDirectSum) {
  const auto a = random_physical_state(1, 1);
  const auto b = random_physical_state(1, 2);
  const auto ab = direct_sum(a, b);
  EXPECT_EQ(ab.n_modes(), 2u);
  EXPECT_EQ(ab.mode(0).cov(), a.cov());
  EXPECT_EQ(ab.mode(1).cov(), b.cov());
  EXPECT_EQ(ab.mode(1).mean(), b.mean());
  EXPECT_THROW(ab.mode(2), InvalidInput);
}
