#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace mubcv {

namespace detail {
struct WavefunctionAccess;
}

inline constexpr std::size_t kMinFrftGrid = 64;
inline constexpr std::size_t kDefaultFrftGrid = 1024;

// Complex amplitudes on the centered grid q_k = (k - n/2) dq, normalized so
// that sum |psi_k|^2 dq = 1.
class SampledWavefunction {
 public:
  // Throws InvalidInput unless n is even and >= 2, dq > 0 and the norm is 1
  // within 1e-8.
  SampledWavefunction(double dq, std::vector<std::complex<double>> amplitudes);

  // Rescales the amplitudes to unit norm first.
  static SampledWavefunction normalize(double dq, std::vector<std::complex<double>> amplitudes);

  // Self-dual grid dq = sqrt(2 pi / n), on which the centered DFT is the
  // quarter-turn FRFT.
  static double self_dual_spacing(std::size_t n);

  template <typename F>
  static SampledWavefunction from_function(std::size_t n, double dq, F&& f) {
    std::vector<std::complex<double>> amps(n);
    for (std::size_t k = 0; k < n; ++k) {
      amps[k] = f(grid_point(n, dq, k));
    }
    return normalize(dq, std::move(amps));
  }

  static double grid_point(std::size_t n, double dq, std::size_t k) {
    return (static_cast<double>(k) - static_cast<double>(n / 2)) * dq;
  }

  std::size_t size() const noexcept { return amplitudes_.size(); }
  double dq() const noexcept { return dq_; }
  double q(std::size_t k) const noexcept { return grid_point(size(), dq_, k); }
  const std::vector<std::complex<double>>& amplitudes() const noexcept { return amplitudes_; }

  // sum |psi_k|^2 dq
  double norm() const;

 private:
  friend struct detail::WavefunctionAccess;
  struct Unchecked {};
  SampledWavefunction(Unchecked, double dq, std::vector<std::complex<double>> amplitudes)
      : dq_(dq), amplitudes_(std::move(amplitudes)) {}

  double dq_;
  std::vector<std::complex<double>> amplitudes_;
};

// Fractional Fourier transform F_theta = exp(-i theta N): the output's
// position distribution is the input's q_theta distribution. theta = pi/2 is
// the centered DFT, theta = pi is parity.
//
// Angles are reduced to beta in [pi/4, 3pi/4) plus an integer number of
// quarter turns (exact centered DFTs), and F_beta is evaluated as
// chirp * scaled DFT * chirp with the scaled DFT done by Bluestein's method.
// Requires a power-of-two grid with n >= 64 and the self-dual spacing.
SampledWavefunction frft(const SampledWavefunction& psi, double theta);

double position_mean(const SampledWavefunction& psi);
double position_variance(const SampledWavefunction& psi);

// Moments of q_theta = cos(theta) x + sin(theta) p via frft(psi, theta).
double rotated_mean(const SampledWavefunction& psi, double theta);
double rotated_variance(const SampledWavefunction& psi, double theta);

// Product of rotated variances at 0, 2pi/3, 4pi/3.
double triple_product_numeric(const SampledWavefunction& psi);

// sqrt(sum |a_k - b_k|^2 dq). Grids must match.
double l2_distance(const SampledWavefunction& a, const SampledWavefunction& b);

// Oscillator eigenfunctions and their combinations on a grid.
SampledWavefunction fock_state(std::size_t n_grid, double dq, unsigned number);
SampledWavefunction coherent_state(std::size_t n_grid, double dq, double mean_x, double mean_p);
// Gaussian with position variance var_x (minimum uncertainty, var_p = 1/(4 var_x)).
SampledWavefunction squeezed_state(std::size_t n_grid, double dq, double var_x);
SampledWavefunction fock_superposition(std::size_t n_grid, double dq,
                                       const std::vector<std::complex<double>>& weights);

}  // namespace mubcv
