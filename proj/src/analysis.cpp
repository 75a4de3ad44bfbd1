#include "mubcv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "mubcv/error.hpp"

namespace mubcv {

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

double model(const Vec4& p, double w) {
  const double z = (w - p[1]) / p[2];
  return p[0] * std::exp(-0.5 * z * z) + p[3];
}

struct Linearization {
  Mat4 jtj = Mat4::Zero();
  Vec4 jtr = Vec4::Zero();
  double chi2 = 0.0;
};

Linearization linearize(const MarginalHistogram& h, const Vec4& p) {
  Linearization lin;
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    const double w = h.bin_centers[k];
    const double z = (w - p[1]) / p[2];
    const double g = std::exp(-0.5 * z * z);
    const double inv_e = 1.0 / h.errors[k];
    const double r = (h.counts[k] - (p[0] * g + p[3])) * inv_e;
    Vec4 j;
    j << g, p[0] * g * z / p[2], p[0] * g * z * z / p[2], 1.0;
    j *= inv_e;
    lin.jtj.noalias() += j * j.transpose();
    lin.jtr += j * r;
    lin.chi2 += r * r;
  }
  return lin;
}

double chi_square(const MarginalHistogram& h, const Vec4& p) {
  double chi2 = 0.0;
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    const double r = (h.counts[k] - model(p, h.bin_centers[k])) / h.errors[k];
    chi2 += r * r;
  }
  return chi2;
}

Vec4 initial_guess(const MarginalHistogram& h) {
  const auto [lo, hi] = std::minmax_element(h.counts.begin(), h.counts.end());
  const double floor = *lo;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    const double c = h.counts[k] - floor;
    s0 += c;
    s1 += c * h.bin_centers[k];
  }
  const double mean = s0 > 0.0 ? s1 / s0 : h.bin_centers[h.counts.size() / 2];
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    const double dw = h.bin_centers[k] - mean;
    s2 += (h.counts[k] - floor) * dw * dw;
  }
  const double pitch = h.bin_centers.size() > 1 ? h.bin_centers[1] - h.bin_centers[0] : 1.0;
  double sigma = s0 > 0.0 ? std::sqrt(s2 / s0) : pitch;
  if (!(sigma > 0.0)) sigma = pitch;
  Vec4 p;
  p << *hi - floor, mean, sigma, floor;
  return p;
}

void check_histogram(const MarginalHistogram& h) {
  const std::size_t n = h.counts.size();
  if (h.bin_centers.size() != n || h.errors.size() != n) {
    throw InvalidInput("histogram arrays differ in length");
  }
  std::size_t filled = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(h.counts[k]) || h.counts[k] < 0.0) {
      throw InvalidInput("histogram counts must be finite and non-negative");
    }
    if (!(h.errors[k] > 0.0) || !std::isfinite(h.errors[k])) {
      throw InvalidInput("histogram errors must be finite and positive");
    }
    if (!std::isfinite(h.bin_centers[k])) throw InvalidInput("bin centers must be finite");
    if (h.counts[k] > 0.0) ++filled;
  }
  if (filled < kMinFitBins) {
    throw InvalidInput("histogram has " + std::to_string(filled) +
                       " non-empty bins; at least 8 are needed for a fit");
  }
}

std::vector<double> as_vector(const Vec4& p) { return {p[0], p[1], p[2], p[3]}; }

}  // namespace

double MarginalHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0.0);
}

MarginalHistogram marginalize(const CoincidenceGrid& grid, Sign sign) {
  grid.validate();
  const std::size_t n = grid.n;
  const double d = grid.d_m;
  const double pitch = (grid.axis1_m[n - 1] - grid.axis1_m[0]) / static_cast<double>(n - 1) / d;
  const double a1 = grid.axis1_m[0] / d;
  const bool plus = sign == Sign::Plus;
  const double origin = plus ? a1 + grid.axis2_m[0] / d : a1 - grid.axis2_m[n - 1] / d;
  const std::size_t bins = 2 * n - 1;

  std::vector<std::uint64_t> acc(bins, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = plus ? i + j : i + (n - 1) - j;
      acc[k] += grid.counts[i * n + j];
    }
  }
  MarginalHistogram h;
  h.bin_centers.resize(bins);
  h.counts.resize(bins);
  h.errors.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    h.bin_centers[k] = origin + static_cast<double>(k) * pitch;
    h.counts[k] = static_cast<double>(acc[k]);
    h.errors[k] = std::max(1.0, std::sqrt(h.counts[k]));
  }
  return h;
}

GaussianFitResult fit_gaussian(const MarginalHistogram& hist) {
  check_histogram(hist);
  Vec4 p = initial_guess(hist);
  Linearization lin = linearize(hist, p);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  while (iter < kMaxFitIterations) {
    ++iter;
    Mat4 a = lin.jtj;
    for (int k = 0; k < 4; ++k) a(k, k) += lambda * std::max(lin.jtj(k, k), 1e-300);
    Vec4 step = a.ldlt().solve(lin.jtr);
    if (p[3] <= 0.0 && step[3] < 0.0) {
      // Background pinned at its bound: drop it from this step.
      a.row(3).setZero();
      a.col(3).setZero();
      a(3, 3) = 1.0;
      Vec4 rhs = lin.jtr;
      rhs[3] = 0.0;
      step = a.ldlt().solve(rhs);
    }
    Vec4 trial = p + step;
    trial[3] = std::max(trial[3], 0.0);
    const double chi2 = (trial[2] > 0.0 && step.allFinite()) ? chi_square(hist, trial)
                                                              : std::numeric_limits<double>::infinity();
    if (chi2 <= lin.chi2) {
      const double drop = lin.chi2 - chi2;
      const Vec4 moved = trial - p;
      p = trial;
      lin = linearize(hist, p);
      lambda = std::max(lambda / 10.0, 1e-12);
      bool small = true;
      const double scale[4] = {std::abs(p[0]), p[2], p[2], std::abs(p[0])};
      for (int k = 0; k < 4; ++k) {
        if (std::abs(moved[k]) > 1e-10 * (scale[k] + 1e-300)) small = false;
      }
      if (small || drop <= 1e-14 * std::max(chi2, 1e-300)) {
        converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e16) {
        // No descent direction left: p is a minimum to working precision.
        converged = true;
        break;
      }
    }
  }
  if (!converged) {
    throw FitFailure("gaussian fit did not converge in " + std::to_string(kMaxFitIterations) +
                         " iterations",
                     as_vector(p));
  }

  GaussianFitResult fit;
  fit.amplitude = p[0];
  fit.mean = p[1];
  fit.sigma = p[2];
  fit.background = p[3];
  fit.chi2 = lin.chi2;
  fit.dof = hist.counts.size() > 4 ? hist.counts.size() - 4 : 0;
  fit.iterations = iter;

  // Invert the curvature after equilibrating its diagonal; the parameters
  // differ in scale by many orders of magnitude.
  Vec4 err = Vec4::Constant(std::numeric_limits<double>::infinity());
  const Vec4 diag = lin.jtj.diagonal();
  if ((diag.array() > 0.0).all()) {
    const Vec4 s = diag.cwiseSqrt().cwiseInverse();
    const Mat4 scaled = s.asDiagonal() * lin.jtj * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat4> eig(scaled);
    if (eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > 1e-14 * eig.eigenvalues().maxCoeff()) {
      const Mat4 cov = s.asDiagonal() * eig.operatorInverseSqrt() * eig.operatorInverseSqrt() *
                       s.asDiagonal();
      for (int k = 0; k < 4; ++k) err[k] = std::sqrt(cov(k, k));
      if (fit.dof > 0) {
        const double reduced = fit.chi2 / static_cast<double>(fit.dof);
        if (reduced > 1.0) err *= std::sqrt(reduced);
      }
    }
  }
  fit.amplitude_error = err[0];
  fit.mean_error = err[1];
  fit.sigma_error = err[2];
  fit.background_error = err[3];
  fit.converged = std::isfinite(fit.sigma_error) && fit.sigma > 0.0 &&
                  fit.sigma_error <= fit.sigma;
  return fit;
}

PlaneAnalysis analyze_plane(const CoincidenceGrid& grid, Sign sign) {
  const GaussianFitResult fit = fit_gaussian(marginalize(grid, sign));
  if (!fit.converged) {
    throw FitFailure("gaussian fit for plane '" + grid.plane + "' (" +
                         std::string(to_string(sign)) + ") is unreliable: sigma error exceeds sigma",
                     {fit.amplitude, fit.mean, fit.sigma, fit.background});
  }
  return {{fit.variance(), fit.variance_error()}, fit};
}

bool CertifyReport::entangled(bool use_minus, bool use_plus) const {
  return (use_minus && minus.entangled) || (use_plus && plus.entangled);
}

CertifyReport certify(const CoincidenceGrid& grid_x, const CoincidenceGrid& grid_u,
                      const CoincidenceGrid& grid_v) {
  const std::array<const CoincidenceGrid*, 3> grids{&grid_x, &grid_u, &grid_v};
  const std::array<GlobalName, 3> names{GlobalName::X, GlobalName::U, GlobalName::V};
  for (const auto* g : grids) g->validate();
  const double d = grid_x.d_m;
  for (const auto* g : grids) {
    if (std::abs(g->d_m - d) > 1e-9 * d) {
      throw InvalidInput("grids use different scaling lengths d (" + std::to_string(d) + " vs " +
                         std::to_string(g->d_m) + " m)");
    }
  }
  CertifyReport report;
  report.d_m = d;
  for (std::size_t k = 0; k < 3; ++k) {
    PlaneRow& row = report.rows[k];
    row.name = names[k];
    row.var_minus = analyze_plane(*grids[k], Sign::Minus).variance;
    row.var_plus = analyze_plane(*grids[k], Sign::Plus).variance;
    const double c = std::sqrt(row.var_plus.value / row.var_minus.value);
    const double rp = row.var_plus.uncertainty / row.var_plus.value;
    const double rm = row.var_minus.uncertainty / row.var_minus.value;
    row.correlation = {c, 0.5 * c * std::sqrt(rp * rp + rm * rm)};
  }
  report.minus = evaluate_criterion(report.rows[0].var_minus, report.rows[1].var_minus,
                                    report.rows[2].var_minus, Sign::Minus);
  report.plus = evaluate_criterion(report.rows[0].var_plus, report.rows[1].var_plus,
                                   report.rows[2].var_plus, Sign::Plus);
  return report;
}

}  // namespace mubcv
