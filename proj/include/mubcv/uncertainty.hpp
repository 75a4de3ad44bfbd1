#pragma once

#include <string>
#include <vector>

#include "mubcv/gaussian.hpp"
#include "mubcv/quadrature.hpp"

namespace mubcv {

// Absolute tolerance on (lhs - bound) used by every satisfied verdict.
inline constexpr double kBoundTolerance = 1e-9;

struct UrReport {
  std::string name;
  double lhs = 0.0;
  double bound = 0.0;
  bool satisfied = false;
  double margin = 0.0;  // lhs - bound
};

UrReport make_report(std::string name, double lhs, double bound);

struct OptimizerResult {
  double eta = 0.0;  // (dx)^2
  double xi = 0.0;   // (dp)^2
  double g_min = 0.0;
  int iterations = 0;
  bool converged = false;
};

// 1/2 |sin(theta_b - theta_a)|.
double pairwise_bound(double theta_a, double theta_b);

// dq_a * dq_b >= pairwise_bound for a single-mode state.
UrReport check_pairwise(const GaussianState& state, double theta_a, double theta_b);

// (dx)^2 (dp)^2 >= 1/4 + 1/4 (<{x,p}> - 2<x><p>)^2.
UrReport check_schrodinger_robertson(const GaussianState& state);

// (dq_a)^2 (dq_b)^2 (dq_c)^2 over the triple's three axes.
double triple_product(const GaussianState& state, const MubTriple& triple = MubTriple{});

// (dx)^2 (3 + ((dx)^2 - 3 (dp)^2)^2) / 16, the state-dependent lower bound
// on the (x, r, s) triple product obtained after eliminating the x-p
// correlation with the Schrodinger-Robertson relation.
double intermediate_bound(const GaussianState& state);

// Every single-mode relation for the (x, r, s) triple: three pairwise URs,
// Schrodinger-Robertson, the intermediate chain and the 1/8 triple bound.
std::vector<UrReport> check_single_mode(const GaussianState& state);

// g(eta, xi) = eta/16 (3 + (eta - 3 xi)^2); eta, xi > 0.
double g(double eta, double xi);
// g on the Heisenberg boundary xi = 1/(4 eta), and its first two derivatives.
double g_sat(double eta);
double g_sat_derivative(double eta);
double g_sat_second_derivative(double eta);

// Minimizes g subject to eta * xi >= 1/4. The interior has no stationary
// point, so the search runs on the boundary xi = 1/(4 eta): safeguarded
// Newton on dg_sat/deta with bisection fallback, then a curvature check.
OptimizerResult minimize_g(double initial_eta = 1.0);

}  // namespace mubcv
