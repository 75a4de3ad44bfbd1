#include "mubcv/entangle.hpp"

#include <cmath>

#include "mubcv/error.hpp"
#include "mubcv/quadrature.hpp"

namespace mubcv {

namespace {

void require_two_modes(const GaussianState& state) {
  if (state.n_modes() != 2) {
    throw InvalidInput("two-mode state required, got " + std::to_string(state.n_modes()) +
                       " modes");
  }
}

double sign_value(Sign sign) { return sign == Sign::Plus ? 1.0 : -1.0; }

}  // namespace

std::string_view to_string(Sign sign) { return sign == Sign::Plus ? "plus" : "minus"; }

std::string_view to_string(GlobalName name) {
  switch (name) {
    case GlobalName::X: return "X";
    case GlobalName::P: return "P";
    case GlobalName::R: return "R";
    case GlobalName::S: return "S";
    case GlobalName::U: return "U";
    case GlobalName::V: return "V";
  }
  return "?";
}

Sign parse_sign(std::string_view text) {
  if (text == "plus" || text == "+") return Sign::Plus;
  if (text == "minus" || text == "-") return Sign::Minus;
  throw InvalidInput("unknown sign '" + std::string(text) + "' (expected plus or minus)");
}

GlobalName parse_global_name(std::string_view text) {
  if (text == "X") return GlobalName::X;
  if (text == "P") return GlobalName::P;
  if (text == "R") return GlobalName::R;
  if (text == "S") return GlobalName::S;
  if (text == "U") return GlobalName::U;
  if (text == "V") return GlobalName::V;
  throw InvalidInput("unknown global operator '" + std::string(text) + "'");
}

LinearObservable build_global(GlobalName name, Sign sign) {
  const double sg = sign_value(sign);
  // Weights on (X, P_same, P_opposite), where P_same = p1 +/- p2 and
  // P_opposite = p1 -/+ p2.
  double wx = 0.0;
  double wp_same = 0.0;
  double wp_opp = 0.0;
  const auto r = axis_coefficients(kTwoPi / 3.0);
  const auto s = axis_coefficients(2.0 * kTwoPi / 3.0);
  switch (name) {
    case GlobalName::X: wx = 1.0; break;
    case GlobalName::P: wp_same = 1.0; break;
    case GlobalName::R: wx = r.cx; wp_same = r.cp; break;
    case GlobalName::S: wx = s.cx; wp_same = s.cp; break;
    case GlobalName::U: wx = r.cx; wp_opp = r.cp; break;
    case GlobalName::V: wx = s.cx; wp_opp = s.cp; break;
  }
  Eigen::Vector4d c;
  c << wx, wp_same + wp_opp, sg * wx, sg * wp_same - sg * wp_opp;
  std::string label = std::string(to_string(name)) + (sign == Sign::Plus ? "+" : "-");
  return LinearObservable(c, std::move(label));
}

GlobalOperatorSet::GlobalOperatorSet(Sign sg)
    : sign(sg),
      x(build_global(GlobalName::X, sg)),
      p(build_global(GlobalName::P, sg)),
      r(build_global(GlobalName::R, sg)),
      s(build_global(GlobalName::S, sg)),
      u(build_global(GlobalName::U, sg)),
      v(build_global(GlobalName::V, sg)) {}

UrReport check_global_ur(const GaussianState& state, Sign sign) {
  require_two_modes(state);
  const GlobalOperatorSet ops(sign);
  const double lhs = observable_variance(state, ops.x) * observable_variance(state, ops.r) *
                     observable_variance(state, ops.s);
  return make_report(std::string("global_xrs_") + std::string(to_string(sign)), lhs, 1.0);
}

GaussianState partial_transpose(const GaussianState& state) {
  require_two_modes(state);
  Eigen::VectorXd mean = state.mean();
  Eigen::MatrixXd cov = state.cov();
  mean[3] = -mean[3];
  cov.row(3) *= -1.0;
  cov.col(3) *= -1.0;
  return GaussianState(std::move(mean), std::move(cov));
}

CriterionReport evaluate_criterion(Measurement var_x, Measurement var_u, Measurement var_v,
                                   Sign sign) {
  for (const auto& m : {var_x, var_u, var_v}) {
    if (!(m.value > 0.0) || !std::isfinite(m.value)) {
      throw InvalidInput("variances must be finite and positive");
    }
    if (!(m.uncertainty >= 0.0) || !std::isfinite(m.uncertainty)) {
      throw InvalidInput("uncertainties must be finite and non-negative");
    }
  }
  CriterionReport report;
  report.sign = sign;
  report.var_x = var_x;
  report.var_u = var_u;
  report.var_v = var_v;
  report.product = var_x.value * var_u.value * var_v.value;
  double rel2 = 0.0;
  for (const auto& m : {var_x, var_u, var_v}) {
    const double rel = m.uncertainty / m.value;
    rel2 += rel * rel;
  }
  report.product_uncertainty = report.product * std::sqrt(rel2);
  report.bound = 1.0;
  report.entangled = report.product + 3.0 * report.product_uncertainty < report.bound;
  if (report.product_uncertainty > 0.0) {
    report.sigma_level = (report.bound - report.product) / report.product_uncertainty;
  }
  return report;
}

CriterionReport evaluate_criterion_from_state(const GaussianState& state, Sign sign) {
  require_two_modes(state);
  const GlobalOperatorSet ops(sign);
  CriterionReport report = evaluate_criterion({observable_variance(state, ops.x), 0.0},
                                              {observable_variance(state, ops.u), 0.0},
                                              {observable_variance(state, ops.v), 0.0}, sign);
  report.entangled = report.product < report.bound - kBoundTolerance;
  return report;
}

}  // namespace mubcv
