#pragma once

#include "mubcv/entangle.hpp"
#include "mubcv/gaussian.hpp"

namespace mubcv {

// Widths of the double-Gaussian two-photon amplitude
//   exp(-(x1 + x2)^2 / 4 sigma_plus^2) exp(-(x1 - x2)^2 / 4 sigma_minus^2)
// in dimensionless units. Entangled iff sigma_plus != sigma_minus.
struct SpdcParams {
  double sigma_plus = 1.0;
  double sigma_minus = 1.0;

  void validate() const;
};

// Lens-system length that turns detector-plane positions into dimensionless
// quadratures: d = sqrt(f sin(angle) / k), k = 2 pi / wavelength.
struct OpticalScaling {
  double focal_length_m = 0.4;
  double wavelength_m = 650e-9;
  double rotation_angle = 1.0471975511965976;  // pi/3

  double d() const;
};

double scaling_factor(double focal_length_m, double wavelength_m, double angle);
double to_dimensionless(double position_m, const OpticalScaling& scaling);

// Zero-mean two-mode state with
//   Var(x1 + x2) = sigma_plus^2,  Var(x1 - x2) = sigma_minus^2,
//   Var(p1 + p2) = 1/sigma_plus^2, Var(p1 - p2) = 1/sigma_minus^2
// and no x-p correlations.
GaussianState spdc_state(const SpdcParams& params);

struct GlobalVariances {
  double x_plus, x_minus;
  double p_plus, p_minus;
  double r_plus, r_minus;
  double s_plus, s_minus;
  double u_plus, u_minus;
  double v_plus, v_minus;

  double get(GlobalName name, Sign sign) const;
};

// Closed-form variances of every global operator on spdc_state.
GlobalVariances analytic_variances(const SpdcParams& params);

// C_W = dW_+ / dW_- from the closed-form variances. Equal to
// sigma_plus / sigma_minus for X, U and V.
double correlation_coefficient(const SpdcParams& params, GlobalName which);

}  // namespace mubcv
