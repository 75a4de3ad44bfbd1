#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mubcv {

// Gaussian state of n bosonic modes in the convention [x, p] = i, vacuum
// variance 1/2. Phase-space ordering is interleaved (x1, p1, x2, p2, ...)
// and cov(i, j) = 1/2 <{dz_i, dz_j}>.
//
// Construction checks shape, symmetry (1e-10) and strictly positive diagonal.
// Physicality (the uncertainty principle) is NOT enforced so that partially
// transposed states can be represented; query it with is_physical().
class GaussianState {
 public:
  GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov);

  static GaussianState vacuum(std::size_t n_modes);
  // Single-mode state with the given diagonal variances and zero mean.
  static GaussianState diagonal(double var_x, double var_p);

  std::size_t n_modes() const noexcept { return static_cast<std::size_t>(mean_.size() / 2); }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& cov() const noexcept { return cov_; }

  // Every eigenvalue of cov + i Omega / 2 is >= -tol.
  bool is_physical(double tol = 1e-9) const;
  // Ascending symplectic eigenvalues (one per mode).
  Eigen::VectorXd symplectic_eigenvalues() const;
  // Reduced single-mode state of one mode.
  GaussianState mode(std::size_t index) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

// Linear combination of phase-space operators: sum_k coeffs[k] z_k.
struct LinearObservable {
  Eigen::VectorXd coeffs;
  std::string label;

  LinearObservable(Eigen::VectorXd c, std::string name = {});

  // q_theta acting on one mode of an n-mode system.
  static LinearObservable quadrature(std::size_t n_modes, std::size_t mode, double theta,
                                     std::string name = {});
};

// Standard symplectic form Omega = diag([[0, 1], [-1, 0]], ...).
Eigen::MatrixXd symplectic_form(std::size_t n_modes);

// Commutator [a, b] = i * symplectic_product(a, b).
double symplectic_product(const LinearObservable& a, const LinearObservable& b);

double observable_mean(const GaussianState& state, const LinearObservable& obs);
double observable_variance(const GaussianState& state, const LinearObservable& obs);
// Symmetrized covariance 1/2 <{dA, dB}>.
double observable_covariance(const GaussianState& state, const LinearObservable& a,
                             const LinearObservable& b);

// Heisenberg-picture rotation of one mode: the new x quadrature is the old
// q_theta, i.e. mean -> R mean and cov -> R cov R^T with R = [[c, s], [-s, c]].
GaussianState rotate_mode(const GaussianState& state, std::size_t mode, double theta);

// Block-diagonal combination a (x) b.
GaussianState direct_sum(const GaussianState& a, const GaussianState& b);

// n_samples draws from the Wigner function (rows are samples, columns are
// phase-space coordinates). Throws InvalidInput for non-physical states.
Eigen::MatrixXd sample_wigner(const GaussianState& state, std::size_t n_samples,
                              std::uint64_t seed);

struct RandomStateOptions {
  double max_squeeze = 1.0;       // |r| bound, squeezer diag(e^-r, e^r)
  double max_excess_noise = 2.0;  // thermal symplectic eigenvalue in [1/2, 1/2 + this]
  double max_displacement = 2.0;
  double pure_fraction = 0.25;    // probability that a mode starts in vacuum noise
};

// S D S^T with D >= 1/2 thermal and S a random symplectic built from local
// rotations, squeezers and (for n > 1) two-mode passive rotations.
GaussianState random_physical_state(std::size_t n_modes, std::uint64_t seed,
                                    const RandomStateOptions& options = {});

// Independent random single-mode states combined with direct_sum.
GaussianState random_product_state(std::size_t n_modes, std::uint64_t seed,
                                   const RandomStateOptions& options = {});

}  // namespace mubcv
