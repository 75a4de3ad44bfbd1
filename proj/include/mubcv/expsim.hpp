#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mubcv/spdc.hpp"

namespace mubcv {

// The three measured planes: (x1, x2), (r1, s2), (s1, r2).
enum class Plane { X, U, V };

std::string to_string(Plane plane);
Plane parse_plane(const std::string& text);
std::array<double, 2> plane_angles(Plane plane);

// Slit-scan acquisition settings. Physical quantities are SI.
struct ScanConfig {
  std::size_t n_bins_per_axis = 150;
  double roi_m = 12e-3;
  double slit_width_m = 80e-6;
  double dwell_time_s = 3.0;
  // Expected coincidences per second at unit (dimensionless) joint density.
  double pair_rate = 7.0e4;
  // Flat accidental/dark coincidence rate per bin.
  double background_rate = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  OpticalScaling scaling;
  std::uint64_t seed = 1;
  // Worker threads for the row loop; 0 picks the hardware concurrency.
  // Output does not depend on this value.
  unsigned threads = 1;

  void validate() const;
  // Bin-center positions, uniform with pitch roi / n and centered on zero.
  std::vector<double> axis_positions() const;
};

struct CoincidenceGrid {
  std::string plane;  // "x", "u", "v" or free-form for imported data
  std::size_t n = 0;
  std::vector<double> axis1_m;
  std::vector<double> axis2_m;
  std::vector<std::uint64_t> counts;  // row-major, counts[i * n + j] at (axis1[i], axis2[j])
  double d_m = 0.0;                    // scaling length shared by both axes
  ScanConfig config;                   // echo of the acquisition settings
  std::optional<SpdcParams> source;    // present for simulated grids
  double fluorescence_rate = 0.0;
  double fluorescence_width = 0.0;

  std::uint64_t at(std::size_t i, std::size_t j) const { return counts[i * n + j]; }
  std::uint64_t total() const;
  std::vector<double> dimensionless_axis1() const;
  std::vector<double> dimensionless_axis2() const;
  // Checks sizes, uniform strictly increasing axes with a common pitch and d > 0.
  void validate() const;
};

// 2x2 covariance of (q1_theta1, q2_theta2) on the SPDC state.
Eigen::Matrix2d joint_covariance(const SpdcParams& params, double theta1, double theta2);

// Bivariate normal density of (q1_theta1, q2_theta2) at (w1, w2).
double joint_density(const SpdcParams& params, double theta1, double theta2, double w1,
                     double w2);

// Expected counts per scan point:
//   pair_rate * dwell * density(w1, w2) * (slit / d)^2 + background_rate * dwell,
// sampled as Poisson. Rows use independent substreams of config.seed.
CoincidenceGrid simulate_scan(const SpdcParams& params, const ScanConfig& config);

// simulate_scan at the plane's angles with seed substream_seed(config.seed, plane).
CoincidenceGrid simulate_plane(const SpdcParams& params, ScanConfig config, Plane plane);

// Same acquisition model for an arbitrary zero-mean bivariate normal whose
// difference and sum marginals have the given variances (dimensionless).
CoincidenceGrid synthesize_plane(double var_minus, double var_plus, const ScanConfig& config,
                                 const std::string& plane);

// Largest expected signal count over the scan points of one plane.
double peak_expected_count(const SpdcParams& params, const ScanConfig& config, Plane plane);

// Adds Poisson noise with a broad separable Gaussian envelope of the given
// dimensionless width, normalized so the envelope averages to one over the
// grid (expected total rate * dwell * n^2).
CoincidenceGrid add_fluorescence_background(const CoincidenceGrid& grid, double profile_width,
                                            double rate, std::uint64_t seed);

}  // namespace mubcv
