#include "mubcv/spdc.hpp"

#include <cmath>

#include "mubcv/error.hpp"
#include "mubcv/quadrature.hpp"

namespace mubcv {

void SpdcParams::validate() const {
  if (!(sigma_plus > 0.0) || !(sigma_minus > 0.0) || !std::isfinite(sigma_plus) ||
      !std::isfinite(sigma_minus)) {
    throw InvalidInput("sigma_plus and sigma_minus must be finite and positive");
  }
}

double scaling_factor(double focal_length_m, double wavelength_m, double angle) {
  if (!(focal_length_m > 0.0) || !(wavelength_m > 0.0) || !std::isfinite(focal_length_m) ||
      !std::isfinite(wavelength_m) || !std::isfinite(angle)) {
    throw InvalidInput("focal length and wavelength must be finite and positive");
  }
  const double s = std::sin(angle);
  if (!(s > 0.0)) {
    throw InvalidInput("scaling factor needs sin(rotation angle) > 0");
  }
  const double k = kTwoPi / wavelength_m;
  return std::sqrt(focal_length_m * s / k);
}

double OpticalScaling::d() const { return scaling_factor(focal_length_m, wavelength_m, rotation_angle); }

double to_dimensionless(double position_m, const OpticalScaling& scaling) {
  return position_m / scaling.d();
}

GaussianState spdc_state(const SpdcParams& params) {
  params.validate();
  const double sp2 = params.sigma_plus * params.sigma_plus;
  const double sm2 = params.sigma_minus * params.sigma_minus;
  const double var_x = 0.25 * (sp2 + sm2);
  const double cov_x = 0.25 * (sp2 - sm2);
  const double var_p = 0.25 * (1.0 / sp2 + 1.0 / sm2);
  const double cov_p = 0.25 * (1.0 / sp2 - 1.0 / sm2);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(4, 4);
  cov(0, 0) = var_x;
  cov(2, 2) = var_x;
  cov(0, 2) = cov(2, 0) = cov_x;
  cov(1, 1) = var_p;
  cov(3, 3) = var_p;
  cov(1, 3) = cov(3, 1) = cov_p;
  return GaussianState(Eigen::VectorXd::Zero(4), std::move(cov));
}

double GlobalVariances::get(GlobalName name, Sign sign) const {
  const bool plus = sign == Sign::Plus;
  switch (name) {
    case GlobalName::X: return plus ? x_plus : x_minus;
    case GlobalName::P: return plus ? p_plus : p_minus;
    case GlobalName::R: return plus ? r_plus : r_minus;
    case GlobalName::S: return plus ? s_plus : s_minus;
    case GlobalName::U: return plus ? u_plus : u_minus;
    case GlobalName::V: return plus ? v_plus : v_minus;
  }
  return 0.0;
}

GlobalVariances analytic_variances(const SpdcParams& params) {
  params.validate();
  const double sp2 = params.sigma_plus * params.sigma_plus;
  const double sm2 = params.sigma_minus * params.sigma_minus;
  GlobalVariances v{};
  v.x_plus = sp2;
  v.x_minus = sm2;
  v.p_plus = 1.0 / sp2;
  v.p_minus = 1.0 / sm2;
  // R and S pair X with the same-sign momentum, U and V with the opposite
  // one; the x-p cross terms vanish for this state.
  v.r_plus = v.s_plus = 0.25 * sp2 + 0.75 / sp2;
  v.r_minus = v.s_minus = 0.25 * sm2 + 0.75 / sm2;
  v.u_plus = v.v_plus = 0.25 * sp2 + 0.75 / sm2;
  v.u_minus = v.v_minus = 0.25 * sm2 + 0.75 / sp2;
  return v;
}

double correlation_coefficient(const SpdcParams& params, GlobalName which) {
  if (which != GlobalName::X && which != GlobalName::U && which != GlobalName::V) {
    throw InvalidInput("correlation coefficient is defined for X, U and V");
  }
  const GlobalVariances v = analytic_variances(params);
  return std::sqrt(v.get(which, Sign::Plus)) / std::sqrt(v.get(which, Sign::Minus));
}

}  // namespace mubcv
