#include "mubcv/uncertainty.hpp"

#include <cmath>
#include <limits>

#include "mubcv/error.hpp"

namespace mubcv {

namespace {

void require_single_mode(const GaussianState& state) {
  if (state.n_modes() != 1) {
    throw InvalidInput("relation is defined for single-mode states, got " +
                       std::to_string(state.n_modes()) + " modes");
  }
}

// Double-angle form: isotropic states give exactly (vx + vp) / 2 on every axis.
double variance_along(const GaussianState& state, double theta) {
  const auto& c = state.cov();
  const double t = reduce_angle(theta);
  return 0.5 * (c(0, 0) + c(1, 1)) + 0.5 * std::cos(2.0 * t) * (c(0, 0) - c(1, 1)) +
         std::sin(2.0 * t) * c(0, 1);
}

void require_positive(double eta, double xi) {
  if (!(eta > 0.0) || !(xi > 0.0) || !std::isfinite(eta) || !std::isfinite(xi)) {
    throw InvalidInput("g requires finite eta > 0 and xi > 0");
  }
}

}  // namespace

UrReport make_report(std::string name, double lhs, double bound) {
  const double margin = lhs - bound;
  return UrReport{std::move(name), lhs, bound, margin >= -kBoundTolerance, margin};
}

double pairwise_bound(double theta_a, double theta_b) {
  return 0.5 * commutator_magnitude(theta_a, theta_b);
}

UrReport check_pairwise(const GaussianState& state, double theta_a, double theta_b) {
  require_single_mode(state);
  const double lhs = std::sqrt(variance_along(state, theta_a) * variance_along(state, theta_b));
  return make_report("pairwise", lhs, pairwise_bound(theta_a, theta_b));
}

UrReport check_schrodinger_robertson(const GaussianState& state) {
  require_single_mode(state);
  const auto& cov = state.cov();
  // <{x, p}> - 2 <x><p> is twice the symmetrized covariance.
  const double anticommutator = 2.0 * cov(0, 1);
  const double lhs = cov(0, 0) * cov(1, 1);
  const double bound = 0.25 + 0.25 * anticommutator * anticommutator;
  return make_report("schrodinger_robertson", lhs, bound);
}

double triple_product(const GaussianState& state, const MubTriple& triple) {
  require_single_mode(state);
  double product = 1.0;
  for (const auto& axis : triple.axes()) {
    product *= variance_along(state, axis.theta());
  }
  return product;
}

double intermediate_bound(const GaussianState& state) {
  require_single_mode(state);
  const double eta = state.cov()(0, 0);
  const double xi = state.cov()(1, 1);
  const double d = eta - 3.0 * xi;
  return eta * (3.0 + d * d) / 16.0;
}

std::vector<UrReport> check_single_mode(const GaussianState& state) {
  require_single_mode(state);
  const MubTriple triple;
  const auto axes = triple.axes();
  std::vector<UrReport> reports;
  const char* pair_names[3] = {"pairwise_x_r", "pairwise_x_s", "pairwise_r_s"};
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int k = 0; k < 3; ++k) {
    auto report = check_pairwise(state, axes[pairs[k][0]].theta(), axes[pairs[k][1]].theta());
    report.name = pair_names[k];
    reports.push_back(std::move(report));
  }
  reports.push_back(check_schrodinger_robertson(state));
  const double triple_value = triple_product(state, triple);
  const double intermediate = intermediate_bound(state);
  reports.push_back(make_report("triple_vs_intermediate", triple_value, intermediate));
  reports.push_back(make_report("intermediate_vs_eighth", intermediate, 0.125));
  reports.push_back(make_report("triple_product", triple_value, 0.125));
  return reports;
}

double g(double eta, double xi) {
  require_positive(eta, xi);
  const double d = eta - 3.0 * xi;
  return eta / 16.0 * (3.0 + d * d);
}

double g_sat(double eta) {
  require_positive(eta, 1.0);
  return g(eta, 0.25 / eta);
}

double g_sat_derivative(double eta) {
  require_positive(eta, 1.0);
  return 3.0 / 256.0 * (16.0 * eta * eta - 3.0 / (eta * eta) + 8.0);
}

double g_sat_second_derivative(double eta) {
  require_positive(eta, 1.0);
  return 9.0 / (128.0 * eta * eta * eta) + 3.0 * eta / 8.0;
}

OptimizerResult minimize_g(double initial_eta) {
  if (!(initial_eta > 0.0) || !std::isfinite(initial_eta)) {
    throw InvalidInput("initial eta must be finite and positive");
  }
  constexpr int kMaxIterations = 200;
  const double inf = std::numeric_limits<double>::infinity();
  double lo = 0.0;
  double hi = inf;
  double eta = initial_eta;
  OptimizerResult result;
  for (int it = 1; it <= kMaxIterations; ++it) {
    result.iterations = it;
    const double slope = g_sat_derivative(eta);
    if (slope == 0.0) {
      result.converged = true;
      break;
    }
    (slope < 0.0 ? lo : hi) = eta;
    double next = eta - slope / g_sat_second_derivative(eta);
    if (!(next > lo && next < hi)) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * eta;
    }
    const bool done = std::abs(next - eta) <= 1e-15 * std::max(1.0, eta);
    eta = next;
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.eta = eta;
  result.xi = 0.25 / eta;
  result.g_min = g(result.eta, result.xi);
  result.converged = result.converged && g_sat_second_derivative(eta) > 0.0;
  return result;
}

}  // namespace mubcv
