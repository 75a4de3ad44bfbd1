#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mubcv/entangle.hpp"
#include "mubcv/expsim.hpp"

namespace mubcv {

// Counts of w = w1 +/- w2 on the lattice whose pitch equals the grid pitch.
struct MarginalHistogram {
  std::vector<double> bin_centers;
  std::vector<double> counts;
  std::vector<double> errors;  // sqrt(count), floored at 1

  double total() const;
};

MarginalHistogram marginalize(const CoincidenceGrid& grid, Sign sign);

struct GaussianFitResult {
  double amplitude = 0.0, mean = 0.0, sigma = 0.0, background = 0.0;
  double amplitude_error = 0.0, mean_error = 0.0, sigma_error = 0.0, background_error = 0.0;
  double chi2 = 0.0;
  std::size_t dof = 0;
  int iterations = 0;
  bool converged = false;

  double variance() const { return sigma * sigma; }
  double variance_error() const { return 2.0 * sigma * sigma_error; }
};

inline constexpr int kMaxFitIterations = 200;
inline constexpr std::size_t kMinFitBins = 8;

// Weighted Levenberg-Marquardt fit of A exp(-(w - mu)^2 / 2 sigma^2) + B with
// weights 1/errors^2 and B >= 0. Parameter errors come from the inverse
// curvature at the optimum, inflated by sqrt(chi2/dof) when that exceeds one.
// A fit whose sigma error exceeds sigma is returned with converged = false.
// Throws InvalidInput for fewer than 8 non-empty bins and FitFailure when
// 200 iterations do not converge.
GaussianFitResult fit_gaussian(const MarginalHistogram& hist);

struct PlaneAnalysis {
  Measurement variance;
  GaussianFitResult fit;
};

// Marginalize then fit. Throws FitFailure if the fit is flagged unconverged.
PlaneAnalysis analyze_plane(const CoincidenceGrid& grid, Sign sign);

struct PlaneRow {
  GlobalName name;
  Measurement var_minus;
  Measurement var_plus;
  Measurement correlation;  // C_W = sqrt(var_plus / var_minus)
};

struct CertifyReport {
  std::array<PlaneRow, 3> rows;  // X, U, V
  CriterionReport minus;
  CriterionReport plus;
  double d_m = 0.0;

  // True if the criterion for any of the requested signs flags entanglement.
  bool entangled(bool use_minus = true, bool use_plus = true) const;
};

// Grids for (x1, x2), (r1, s2), (s1, r2). All three must share d.
CertifyReport certify(const CoincidenceGrid& grid_x, const CoincidenceGrid& grid_u,
                      const CoincidenceGrid& grid_v);

}  // namespace mubcv
