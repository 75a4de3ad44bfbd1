#include "mubcv/expsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "mubcv/error.hpp"
#include "mubcv/quadrature.hpp"
#include "mubcv/random.hpp"

namespace mubcv {

namespace {

void require_finite_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw InvalidInput(std::string(name) + " must be finite and non-negative");
  }
}

unsigned resolve_threads(unsigned requested, std::size_t rows) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(rows, 1)));
}

// Runs fn(row) for every row. Each row draws from its own substream, so the
// partition over threads does not affect the result.
template <typename Fn>
void for_each_row(std::size_t rows, unsigned threads, Fn fn) {
  if (threads <= 1) {
    for (std::size_t i = 0; i < rows; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < rows; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

double bivariate_density(const Eigen::Matrix2d& cov, double w1, double w2) {
  const double det = cov.determinant();
  if (!(det > 0.0)) throw InvalidInput("joint covariance is singular");
  const double q = (cov(1, 1) * w1 * w1 - 2.0 * cov(0, 1) * w1 * w2 + cov(0, 0) * w2 * w2) / det;
  return std::exp(-0.5 * q) / (kTwoPi * std::sqrt(det));
}

CoincidenceGrid empty_grid(const ScanConfig& config, std::string plane) {
  CoincidenceGrid grid;
  grid.plane = std::move(plane);
  grid.n = config.n_bins_per_axis;
  grid.axis1_m = config.axis_positions();
  grid.axis2_m = grid.axis1_m;
  grid.counts.assign(grid.n * grid.n, 0);
  grid.d_m = config.scaling.d();
  grid.config = config;
  return grid;
}

CoincidenceGrid sample_grid(const Eigen::Matrix2d& cov, const ScanConfig& config,
                            std::string plane) {
  config.validate();
  CoincidenceGrid grid = empty_grid(config, std::move(plane));
  const double d = grid.d_m;
  const double area = (config.slit_width_m / d) * (config.slit_width_m / d);
  const double signal_scale = config.pair_rate * config.dwell_time_s * area;
  const double background = config.background_rate * config.dwell_time_s;
  const std::size_t n = grid.n;
  for_each_row(n, resolve_threads(config.threads, n), [&](std::size_t i) {
    Rng rng(substream_seed(config.seed, i));
    const double w1 = grid.axis1_m[i] / d;
    for (std::size_t j = 0; j < n; ++j) {
      const double w2 = grid.axis2_m[j] / d;
      const double mu = signal_scale * bivariate_density(cov, w1, w2) + background;
      grid.counts[i * n + j] = rng.poisson(mu);
    }
  });
  return grid;
}

}  // namespace

std::string to_string(Plane plane) {
  switch (plane) {
    case Plane::X: return "x";
    case Plane::U: return "u";
    case Plane::V: return "v";
  }
  return "?";
}

Plane parse_plane(const std::string& text) {
  if (text == "x" || text == "X") return Plane::X;
  if (text == "u" || text == "U") return Plane::U;
  if (text == "v" || text == "V") return Plane::V;
  throw InvalidInput("unknown plane '" + text + "' (expected x, u or v)");
}

std::array<double, 2> plane_angles(Plane plane) {
  const double third = kTwoPi / 3.0;
  switch (plane) {
    case Plane::X: return {0.0, 0.0};
    case Plane::U: return {third, 2.0 * third};
    case Plane::V: return {2.0 * third, third};
  }
  return {0.0, 0.0};
}

void ScanConfig::validate() const {
  if (n_bins_per_axis < 2) throw InvalidInput("n_bins_per_axis must be at least 2");
  if (!(roi_m > 0.0) || !std::isfinite(roi_m)) throw InvalidInput("roi_m must be positive");
  if (!(slit_width_m > 0.0) || !std::isfinite(slit_width_m)) {
    throw InvalidInput("slit_width_m must be positive");
  }
  require_finite_nonneg(dwell_time_s, "dwell_time_s");
  require_finite_nonneg(pair_rate, "pair_rate");
  require_finite_nonneg(background_rate, "background_rate");
  if (!std::isfinite(theta1) || !std::isfinite(theta2)) {
    throw InvalidInput("rotation angles must be finite");
  }
  scaling.d();
}

std::vector<double> ScanConfig::axis_positions() const {
  const double pitch = roi_m / static_cast<double>(n_bins_per_axis);
  const double center = 0.5 * static_cast<double>(n_bins_per_axis - 1);
  std::vector<double> pos(n_bins_per_axis);
  for (std::size_t i = 0; i < n_bins_per_axis; ++i) {
    pos[i] = (static_cast<double>(i) - center) * pitch;
  }
  return pos;
}

std::uint64_t CoincidenceGrid::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::vector<double> CoincidenceGrid::dimensionless_axis1() const {
  std::vector<double> out(axis1_m.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = axis1_m[i] / d_m;
  return out;
}

std::vector<double> CoincidenceGrid::dimensionless_axis2() const {
  std::vector<double> out(axis2_m.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = axis2_m[i] / d_m;
  return out;
}

void CoincidenceGrid::validate() const {
  if (n < 2) throw InvalidInput("grid needs at least 2 bins per axis");
  if (axis1_m.size() != n || axis2_m.size() != n) throw InvalidInput("axis length mismatch");
  if (counts.size() != n * n) throw InvalidInput("counts size mismatch");
  if (!(d_m > 0.0) || !std::isfinite(d_m)) throw InvalidInput("scaling length d must be positive");
  const double pitch = axis1_m[1] - axis1_m[0];
  if (!(pitch > 0.0)) throw InvalidInput("axes must be strictly increasing");
  const double tol = 1e-6 * pitch;
  for (const auto* axis : {&axis1_m, &axis2_m}) {
    for (std::size_t i = 1; i < n; ++i) {
      const double step = (*axis)[i] - (*axis)[i - 1];
      if (!std::isfinite(step) || std::abs(step - pitch) > tol) {
        throw InvalidInput("axes must be uniform with a common pitch");
      }
    }
  }
}

Eigen::Matrix2d joint_covariance(const SpdcParams& params, double theta1, double theta2) {
  const GaussianState state = spdc_state(params);
  const auto a = LinearObservable::quadrature(2, 0, theta1, "q1");
  const auto b = LinearObservable::quadrature(2, 1, theta2, "q2");
  Eigen::Matrix2d cov;
  cov(0, 0) = observable_variance(state, a);
  cov(1, 1) = observable_variance(state, b);
  cov(0, 1) = cov(1, 0) = observable_covariance(state, a, b);
  return cov;
}

double joint_density(const SpdcParams& params, double theta1, double theta2, double w1,
                     double w2) {
  return bivariate_density(joint_covariance(params, theta1, theta2), w1, w2);
}

CoincidenceGrid simulate_scan(const SpdcParams& params, const ScanConfig& config) {
  params.validate();
  CoincidenceGrid grid =
      sample_grid(joint_covariance(params, config.theta1, config.theta2), config, "custom");
  grid.source = params;
  return grid;
}

CoincidenceGrid simulate_plane(const SpdcParams& params, ScanConfig config, Plane plane) {
  const auto angles = plane_angles(plane);
  config.theta1 = angles[0];
  config.theta2 = angles[1];
  const std::uint64_t run_seed = config.seed;
  config.seed = substream_seed(run_seed, static_cast<std::uint64_t>(plane));
  CoincidenceGrid grid = simulate_scan(params, config);
  grid.plane = to_string(plane);
  grid.config.seed = run_seed;
  return grid;
}

CoincidenceGrid synthesize_plane(double var_minus, double var_plus, const ScanConfig& config,
                                 const std::string& plane) {
  if (!(var_minus > 0.0) || !(var_plus > 0.0) || !std::isfinite(var_minus) ||
      !std::isfinite(var_plus)) {
    throw InvalidInput("marginal variances must be finite and positive");
  }
  // w+ = w1 + w2 and w- = w1 - w2 independent with the given variances.
  Eigen::Matrix2d cov;
  cov(0, 0) = cov(1, 1) = 0.25 * (var_plus + var_minus);
  cov(0, 1) = cov(1, 0) = 0.25 * (var_plus - var_minus);
  return sample_grid(cov, config, plane);
}

double peak_expected_count(const SpdcParams& params, const ScanConfig& config, Plane plane) {
  config.validate();
  const auto angles = plane_angles(plane);
  const Eigen::Matrix2d cov = joint_covariance(params, angles[0], angles[1]);
  const double d = config.scaling.d();
  const double area = (config.slit_width_m / d) * (config.slit_width_m / d);
  const auto pos = config.axis_positions();
  double peak = 0.0;
  for (double a : pos) {
    for (double b : pos) peak = std::max(peak, bivariate_density(cov, a / d, b / d));
  }
  return config.pair_rate * config.dwell_time_s * area * peak;
}

CoincidenceGrid add_fluorescence_background(const CoincidenceGrid& grid, double profile_width,
                                            double rate, std::uint64_t seed) {
  require_finite_nonneg(rate, "fluorescence rate");
  if (!(profile_width > 0.0) || !std::isfinite(profile_width)) {
    throw InvalidInput("fluorescence profile width must be positive");
  }
  grid.validate();
  CoincidenceGrid out = grid;
  if (rate == 0.0) return out;
  const std::size_t n = grid.n;
  const auto w1 = grid.dimensionless_axis1();
  const auto w2 = grid.dimensionless_axis2();
  std::vector<double> e1(n), e2(n);
  for (std::size_t i = 0; i < n; ++i) {
    e1[i] = std::exp(-0.5 * w1[i] * w1[i] / (profile_width * profile_width));
    e2[i] = std::exp(-0.5 * w2[i] * w2[i] / (profile_width * profile_width));
  }
  const double mean1 = std::accumulate(e1.begin(), e1.end(), 0.0) / static_cast<double>(n);
  const double mean2 = std::accumulate(e2.begin(), e2.end(), 0.0) / static_cast<double>(n);
  const double scale = rate * grid.config.dwell_time_s / (mean1 * mean2);
  for_each_row(n, resolve_threads(grid.config.threads, n), [&](std::size_t i) {
    Rng rng(substream_seed(seed, i));
    for (std::size_t j = 0; j < n; ++j) {
      out.counts[i * n + j] += rng.poisson(scale * e1[i] * e2[j]);
    }
  });
  out.fluorescence_rate += rate;
  out.fluorescence_width = profile_width;
  return out;
}

}  // namespace mubcv
