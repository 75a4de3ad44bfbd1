#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "mubcv/gaussian.hpp"
#include "mubcv/uncertainty.hpp"

namespace mubcv {

enum class Sign { Plus, Minus };

enum class GlobalName { X, P, R, S, U, V };

std::string_view to_string(Sign sign);
std::string_view to_string(GlobalName name);
Sign parse_sign(std::string_view text);
GlobalName parse_global_name(std::string_view text);

// Two-mode global operators. For sign +/-:
//   X = x1 +/- x2, P = p1 +/- p2,
//   R = cos(2pi/3) X + sin(2pi/3) P,  S = cos(4pi/3) X + sin(4pi/3) P,
//   U = cos(2pi/3) X + sin(2pi/3) P' = r1 +/- s2,
//   V = cos(4pi/3) X + sin(4pi/3) P' = s1 +/- r2,
// where P' = p1 -/+ p2 is the momentum combination of the opposite sign.
LinearObservable build_global(GlobalName name, Sign sign);

struct GlobalOperatorSet {
  Sign sign;
  LinearObservable x, p, r, s, u, v;

  explicit GlobalOperatorSet(Sign sign);
};

// (dX)^2 (dR)^2 (dS)^2 >= 1 for any two-mode state.
UrReport check_global_ur(const GaussianState& state, Sign sign);

// Mirror reflection p2 -> -p2. The result may be non-physical, which
// certifies a negative partial transpose.
GaussianState partial_transpose(const GaussianState& state);

struct Measurement {
  double value = 0.0;
  double uncertainty = 0.0;
};

struct CriterionReport {
  Sign sign = Sign::Minus;
  Measurement var_x, var_u, var_v;
  double product = 0.0;
  double product_uncertainty = 0.0;
  double bound = 1.0;
  bool entangled = false;
  // (bound - product) / product_uncertainty; empty when the uncertainty is zero.
  std::optional<double> sigma_level;
};

// Verdict for measured variances: product + 3 sigma < 1. The three variances
// are treated as independent (relative errors add in quadrature).
CriterionReport evaluate_criterion(Measurement var_x, Measurement var_u, Measurement var_v,
                                   Sign sign);

// Exact variances from a state; verdict product < 1 - 1e-9.
CriterionReport evaluate_criterion_from_state(const GaussianState& state, Sign sign);

}  // namespace mubcv
