#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mubcv/error.hpp"
#include "mubcv/spdc.hpp"
#include "oracles.hpp"

using namespace mubcv;

namespace {

constexpr double kPi = oracle::kPi;

std::vector<double> cov_vector(const GaussianState& st) {
  std::vector<double> out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.push_back(st.cov()(i, j));
  return out;
}

// Closed forms from the double-Gaussian amplitude, written out independently.
struct Expected {
  double x_m, x_p, u_m, u_p;
};

Expected closed_form(double sp, double sm) {
  return {sm * sm, sp * sp, 0.25 * sm * sm + 0.75 / (sp * sp), 0.25 * sp * sp + 0.75 / (sm * sm)};
}

}  // namespace

TEST(SpdcParams, Validation) {
  EXPECT_NO_THROW((SpdcParams{2, 0.5}.validate()));
  EXPECT_THROW((SpdcParams{0, 1}.validate()), InvalidInput);
  EXPECT_THROW((SpdcParams{1, -1}.validate()), InvalidInput);
  EXPECT_THROW((SpdcParams{INFINITY, 1}.validate()), InvalidInput);
  EXPECT_THROW((SpdcParams{1, NAN}.validate()), InvalidInput);
  EXPECT_THROW(spdc_state({0, 1}), InvalidInput);
  EXPECT_THROW(analytic_variances({1, 0}), InvalidInput);
}

TEST(SpdcState, Examples) {
  const auto vac = spdc_state({1, 1});
  EXPECT_LT((vac.cov() - 0.5 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);

  const auto st = spdc_state({2, 0.5});
  const auto& c = st.cov();
  EXPECT_NEAR(c(0, 0), (4 + 0.25) / 4, 1e-15);
  EXPECT_NEAR(c(0, 2), (4 - 0.25) / 4, 1e-15);
  EXPECT_NEAR(c(1, 1), (0.25 + 4) / 4, 1e-15);
  EXPECT_NEAR(c(1, 3), (0.25 - 4) / 4, 1e-15);
  EXPECT_EQ(c(0, 1), 0.0);
  EXPECT_EQ(c(0, 3), 0.0);
  EXPECT_EQ(c(2, 1), 0.0);
  EXPECT_TRUE(st.mean().isZero());

  LinearObservable xm(Eigen::Vector4d(1, 0, -1, 0)), pp(Eigen::Vector4d(0, 1, 0, 1));
  EXPECT_NEAR(observable_variance(st, xm), 0.25, 1e-15);
  EXPECT_NEAR(observable_variance(st, pp), 0.25, 1e-15);

  // Monte-Carlo cross-check of both variances.
  const auto cv = cov_vector(st);
  const auto mx = oracle::mc_variance(cv, 4, {1, 0, -1, 0}, 400000, 11);
  const auto mp = oracle::mc_variance(cv, 4, {0, 1, 0, 1}, 400000, 12);
  EXPECT_NEAR(mx.variance, 0.25, 5 * mx.variance_stderr);
  EXPECT_NEAR(mp.variance, 0.25, 5 * mp.variance_stderr);
}

TEST(SpdcState, PureWhenWidthsAreReciprocal) {
  for (double sp : {0.2, 1.0, 3.0, 17.0}) {
    const auto nu = spdc_state({sp, 1 / sp}).symplectic_eigenvalues();
    EXPECT_NEAR(nu[0], 0.5, 1e-10);
    EXPECT_NEAR(nu[1], 0.5, 1e-10);
  }
  // Otherwise mixed, with eigenvalues from the determinant of each block.
  const auto nu = spdc_state({3, 0.5}).symplectic_eigenvalues();
  EXPECT_GT(nu[1], 0.5);
}

TEST(SpdcState, ExchangeSymmetry) {
  Eigen::Matrix4d swap = Eigen::Matrix4d::Zero();
  swap(0, 2) = swap(1, 3) = swap(2, 0) = swap(3, 1) = 1;
  for (double sp : {0.3, 2.0, 35.0}) {
    for (double sm : {0.1, 0.7, 4.0}) {
      const auto c = spdc_state({sp, sm}).cov();
      EXPECT_LT((swap * c * swap.transpose() - c).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(SpdcState, EprProducts) {
  for (double sp : {0.3, 1.0, 2.0, 35.0}) {
    for (double sm : {0.1, 0.7, 4.0}) {
      const auto st = spdc_state({sp, sm});
      for (double sg : {1.0, -1.0}) {
        LinearObservable x(Eigen::Vector4d(1, 0, sg, 0)), p(Eigen::Vector4d(0, 1, 0, sg));
        EXPECT_NEAR(observable_variance(st, x) * observable_variance(st, p), 1.0, 1e-10);
      }
    }
  }
}

TEST(AnalyticVariances, Examples) {
  const auto v = analytic_variances({2, 0.5});
  EXPECT_NEAR(v.x_minus, 0.25, 1e-15);
  EXPECT_NEAR(v.u_minus, 0.25, 1e-15);
  EXPECT_NEAR(v.v_minus, 0.25, 1e-15);
  EXPECT_NEAR(v.x_plus, 4.0, 1e-15);
  EXPECT_NEAR(analytic_variances({1, 1}).u_minus, 1.0, 1e-15);
  const auto w = analytic_variances({10, 0.1});
  EXPECT_NEAR(w.x_minus * w.u_minus * w.v_minus, 1e-6, 1e-18);
}

TEST(AnalyticVariances, MonteCarloOracle) {
  const SpdcParams p{2, 0.5};
  const auto cv = cov_vector(spdc_state(p));
  const auto v = analytic_variances(p);
  const GlobalOperatorSet ops(Sign::Minus);
  for (const auto* obs : {&ops.x, &ops.u, &ops.v}) {
    std::vector<double> c(obs->coeffs.data(), obs->coeffs.data() + 4);
    const auto mc = oracle::mc_variance(cv, 4, c, 2000000, 77);
    EXPECT_NEAR(mc.variance, 0.25, 5 * mc.variance_stderr) << obs->label;
  }
  (void)v;
}

TEST(AnalyticVariances, MatchCovarianceEngineAndClosedForm) {
  for (double sp : {0.25, 0.7, 1.0, 2.0, 5.0, 35.0, 100.0}) {
    for (double sm : {0.05, 0.5, 0.7, 1.0, 3.0}) {
      const SpdcParams p{sp, sm};
      const auto st = spdc_state(p);
      const auto v = analytic_variances(p);
      for (auto sign : {Sign::Plus, Sign::Minus}) {
        for (auto name : {GlobalName::X, GlobalName::P, GlobalName::R, GlobalName::S, GlobalName::U,
                          GlobalName::V}) {
          const double num = observable_variance(st, build_global(name, sign));
          EXPECT_NEAR(v.get(name, sign), num, 1e-12 * std::max(1.0, num)) << sp << " " << sm;
        }
      }
      const auto e = closed_form(sp, sm);
      const double tol = 1e-12 * std::max({1.0, sp * sp, 1 / (sm * sm)});
      EXPECT_NEAR(v.x_minus, e.x_m, tol);
      EXPECT_NEAR(v.x_plus, e.x_p, tol);
      EXPECT_NEAR(v.u_minus, e.u_m, tol);
      EXPECT_NEAR(v.u_plus, e.u_p, tol);
      EXPECT_NEAR(v.v_minus, e.u_m, tol);
      EXPECT_NEAR(v.v_plus, e.u_p, tol);
    }
  }
}

TEST(CorrelationCoefficient, Examples) {
  for (auto w : {GlobalName::X, GlobalName::U, GlobalName::V}) {
    EXPECT_NEAR(correlation_coefficient({2, 0.5}, w), 4.0, 1e-12);
    EXPECT_NEAR(correlation_coefficient({1.3, 1.3}, w), 1.0, 1e-12);
    EXPECT_NEAR(correlation_coefficient({50 * 0.7, 0.7}, w), 50.0, 1e-10);
  }
  EXPECT_THROW(correlation_coefficient({2, 0.5}, GlobalName::R), InvalidInput);
}

TEST(Scaling, Examples) {
  const double d = scaling_factor(0.4, 650e-9, kPi / 3);
  EXPECT_NEAR(d, 189e-6, 1e-6);
  EXPECT_NEAR(d, std::sqrt(0.4 * std::sin(kPi / 3) * 650e-9 / (2 * kPi)), 1e-18);
  EXPECT_DOUBLE_EQ(OpticalScaling{}.d(), d);
  const double lam = 500e-9;
  EXPECT_NEAR(scaling_factor(lam * 2 * kPi, lam, kPi / 2), lam, 1e-20);
  EXPECT_NEAR(scaling_factor(0.8, 650e-9, kPi / 3) / d, std::sqrt(2.0), 1e-14);
  EXPECT_THROW(scaling_factor(0, 650e-9, 1), InvalidInput);
  EXPECT_THROW(scaling_factor(0.4, -1, 1), InvalidInput);
  EXPECT_THROW(scaling_factor(0.4, 650e-9, 0.0), InvalidInput);
  EXPECT_THROW(scaling_factor(0.4, 650e-9, 1.5 * kPi), InvalidInput);
  EXPECT_THROW(scaling_factor(0.4, 650e-9, -kPi / 2), InvalidInput);
}

TEST(Scaling, ToDimensionless) {
  const OpticalScaling s;
  const double d = s.d();
  EXPECT_DOUBLE_EQ(to_dimensionless(d, s), 1.0);
  EXPECT_EQ(to_dimensionless(0.0, s), 0.0);
  // The 12 mm region spans about +/-31.7 scaled units with d = 189 um.
  EXPECT_NEAR(to_dimensionless(6e-3, s), 6e-3 / d, 1e-12);
  EXPECT_NEAR(to_dimensionless(6e-3, s), 31.75, 0.1);
  EXPECT_NEAR(to_dimensionless(-6e-3, s), -31.75, 0.1);
}

// Along the pure family sigma_+ sigma_- = 1 the minus-sign product is
// sigma_-^6, so any ratio above one is flagged; the mirrored state is caught
// by the plus sign.
TEST(Spdc, EntangledIffWidthsDiffer) {
  for (int k = 0; k < 20; ++k) {
    const double ratio = 1.1 * std::pow(100 / 1.1, k / 19.0);
    const double r = std::sqrt(ratio);
    const auto wide = evaluate_criterion_from_state(spdc_state({r, 1 / r}), Sign::Minus);
    EXPECT_TRUE(wide.entangled) << ratio;
    EXPECT_NEAR(wide.product, std::pow(r, -6), 1e-12);
    EXPECT_TRUE(evaluate_criterion_from_state(spdc_state({1 / r, r}), Sign::Plus).entangled) << ratio;
  }
  for (double s : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    for (auto sign : {Sign::Plus, Sign::Minus}) {
      EXPECT_FALSE(evaluate_criterion_from_state(spdc_state({s, s}), sign).entangled) << s;
    }
  }
}
