#include "mubcv/frft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "mubcv/error.hpp"
#include "mubcv/quadrature.hpp"

namespace mubcv {

namespace detail {
struct WavefunctionAccess {
  static SampledWavefunction make(double dq, std::vector<std::complex<double>> amps) {
    return SampledWavefunction(SampledWavefunction::Unchecked{}, dq, std::move(amps));
  }
};
}  // namespace detail

namespace {

using cvec = std::vector<std::complex<double>>;
using namespace std::complex_literals;

constexpr double kNormTolerance = 1e-8;

double norm_of(const cvec& amps, double dq) {
  double sum = 0.0;
  for (const auto& a : amps) {
    sum += std::norm(a);
  }
  return sum * dq;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW plans are created once per size under a lock; execution on fresh
// arrays (fftw_execute_dft) is thread-safe.
struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

PlanPair plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) {
    return it->second;
  }
  auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  const int size = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair pair{fftw_plan_dft_1d(size, scratch, scratch, FFTW_FORWARD, flags),
                fftw_plan_dft_1d(size, scratch, scratch, FFTW_BACKWARD, flags)};
  fftw_free(scratch);
  cache.emplace(n, pair);
  return pair;
}

// Unnormalized in-place transform: forward uses exp(-2 pi i m k / n).
void fft_in_place(cvec& data, bool forward) {
  const PlanPair plans = plans_for(data.size());
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(forward ? plans.forward : plans.backward, ptr, ptr);
}

// Centered unitary DFT: (1/sqrt n) sum_k exp(-2 pi i (m - n/2)(k - n/2) / n) psi_k.
// With n divisible by 4 the centering phases reduce to (-1)^k and (-1)^m.
cvec quarter_turn(const cvec& in) {
  const std::size_t n = in.size();
  cvec data(n);
  for (std::size_t k = 0; k < n; ++k) {
    data[k] = (k % 2 == 0) ? in[k] : -in[k];
  }
  fft_in_place(data, true);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t m = 0; m < n; ++m) {
    data[m] *= (m % 2 == 0) ? scale : -scale;
  }
  return data;
}

// psi(q) -> psi(-q) on the centered grid: index k -> (n - k) mod n.
cvec parity(const cvec& in) {
  const std::size_t n = in.size();
  cvec out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = in[(n - k) % n];
  }
  return out;
}

// F_beta for |cot beta| <= 1:
//   out(u) = sqrt(1 - i cot b)/sqrt(2 pi) e^{i cot u^2 / 2}
//            * sum_k e^{-i u q_k / sin b} e^{i cot q_k^2 / 2} psi_k dq.
// The scaled sum is a chirp-z transform evaluated with Bluestein's identity
// M K = (M^2 + K^2 - (M - K)^2) / 2 on grid indices.
cvec chirp_transform(const cvec& in, double dq, double beta) {
  const std::size_t n = in.size();
  const auto half = static_cast<double>(n / 2);
  const double s = std::sin(beta);
  const double cot = std::cos(beta) / s;
  const double a = dq * dq / s;

  const std::size_t padded = 2 * n;
  cvec lhs(padded, 0.0);
  cvec kernel(padded, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double idx = static_cast<double>(k) - half;
    const double q = idx * dq;
    lhs[k] = in[k] * std::exp(1i * (0.5 * cot * q * q - 0.5 * a * idx * idx));
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double jj = static_cast<double>(j);
    const std::complex<double> c = std::exp(1i * (0.5 * a * jj * jj));
    kernel[j] = c;
    if (j != 0) {
      kernel[padded - j] = c;
    }
  }
  fft_in_place(lhs, true);
  fft_in_place(kernel, true);
  for (std::size_t k = 0; k < padded; ++k) {
    lhs[k] *= kernel[k];
  }
  fft_in_place(lhs, false);

  const std::complex<double> prefactor =
      std::sqrt(std::complex<double>(1.0, -cot)) / std::sqrt(kTwoPi);
  const double inv_padded = 1.0 / static_cast<double>(padded);
  cvec out(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double idx = static_cast<double>(m) - half;
    const double u = idx * dq;
    out[m] = prefactor * dq * inv_padded * lhs[m] *
             std::exp(1i * (0.5 * cot * u * u - 0.5 * a * idx * idx));
  }
  return out;
}

}  // namespace

SampledWavefunction::SampledWavefunction(double dq, cvec amplitudes)
    : dq_(dq), amplitudes_(std::move(amplitudes)) {
  if (!(dq_ > 0.0) || !std::isfinite(dq_)) {
    throw InvalidInput("grid spacing must be positive and finite");
  }
  if (amplitudes_.size() < 2 || amplitudes_.size() % 2 != 0) {
    throw InvalidInput("wavefunction grid needs an even number of points");
  }
  const double nrm = norm();
  if (!(std::abs(nrm - 1.0) <= kNormTolerance)) {
    throw InvalidInput("wavefunction is not normalized (norm " + std::to_string(nrm) + ")");
  }
}

SampledWavefunction SampledWavefunction::normalize(double dq, cvec amplitudes) {
  if (!(dq > 0.0)) {
    throw InvalidInput("grid spacing must be positive");
  }
  const double nrm = norm_of(amplitudes, dq);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    throw InvalidInput("cannot normalize a zero or non-finite wavefunction");
  }
  const double scale = 1.0 / std::sqrt(nrm);
  for (auto& a : amplitudes) {
    a *= scale;
  }
  return SampledWavefunction(dq, std::move(amplitudes));
}

double SampledWavefunction::self_dual_spacing(std::size_t n) {
  return std::sqrt(kTwoPi / static_cast<double>(n));
}

double SampledWavefunction::norm() const { return norm_of(amplitudes_, dq_); }

SampledWavefunction frft(const SampledWavefunction& psi, double theta) {
  const std::size_t n = psi.size();
  if (n < kMinFrftGrid || !is_power_of_two(n)) {
    throw InvalidInput("FRFT needs a power-of-two grid with at least 64 points, got " +
                       std::to_string(n));
  }
  const double self_dual = SampledWavefunction::self_dual_spacing(n);
  if (std::abs(psi.dq() - self_dual) > 1e-9 * self_dual) {
    throw InvalidInput("FRFT needs the self-dual spacing dq = sqrt(2 pi / n) = " +
                       std::to_string(self_dual) + " for n = " + std::to_string(n) + ", got " +
                       std::to_string(psi.dq()));
  }
  const double reduced = reduce_angle(theta);
  const double pi = std::numbers::pi;
  if (reduced == 0.0) {
    return psi;
  }
  if (reduced == pi) {
    return detail::WavefunctionAccess::make(psi.dq(), parity(psi.amplitudes()));
  }

  // theta = turns * pi/2 + beta with beta in [pi/4, 3pi/4).
  const double quarter = 0.5 * pi;
  auto turns = static_cast<long>(std::floor((reduced - 0.25 * pi) / quarter));
  double beta = reduced - static_cast<double>(turns) * quarter;
  turns = ((turns % 4) + 4) % 4;

  cvec amps = psi.amplitudes();
  if (turns >= 2) {
    amps = parity(amps);
  }
  if (turns % 2 == 1) {
    amps = quarter_turn(amps);
  }
  amps = (beta == quarter) ? quarter_turn(amps) : chirp_transform(amps, psi.dq(), beta);
  return detail::WavefunctionAccess::make(psi.dq(), std::move(amps));
}

double position_mean(const SampledWavefunction& psi) {
  double sum = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    sum += psi.q(k) * std::norm(psi.amplitudes()[k]);
  }
  return sum * psi.dq();
}

double position_variance(const SampledWavefunction& psi) {
  double second = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const double q = psi.q(k);
    second += q * q * std::norm(psi.amplitudes()[k]);
  }
  const double mean = position_mean(psi);
  return second * psi.dq() - mean * mean;
}

double rotated_mean(const SampledWavefunction& psi, double theta) {
  return position_mean(frft(psi, theta));
}

double rotated_variance(const SampledWavefunction& psi, double theta) {
  return position_variance(frft(psi, theta));
}

double triple_product_numeric(const SampledWavefunction& psi) {
  double product = 1.0;
  for (const auto& axis : MubTriple{}.axes()) {
    product *= rotated_variance(psi, axis.theta());
  }
  return product;
}

double l2_distance(const SampledWavefunction& a, const SampledWavefunction& b) {
  if (a.size() != b.size() || a.dq() != b.dq()) {
    throw InvalidInput("wavefunctions live on different grids");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sum += std::norm(a.amplitudes()[k] - b.amplitudes()[k]);
  }
  return std::sqrt(sum * a.dq());
}

SampledWavefunction fock_superposition(std::size_t n_grid, double dq, const cvec& weights) {
  if (weights.empty()) {
    throw InvalidInput("need at least one Fock weight");
  }
  cvec amps(n_grid, 0.0);
  const double norm0 = std::pow(std::numbers::pi, -0.25);
  for (std::size_t k = 0; k < n_grid; ++k) {
    const double q = SampledWavefunction::grid_point(n_grid, dq, k);
    // Normalized Hermite functions by the three-term recurrence.
    double prev = 0.0;
    double cur = norm0 * std::exp(-0.5 * q * q);
    for (std::size_t level = 0; level < weights.size(); ++level) {
      amps[k] += weights[level] * cur;
      const double l = static_cast<double>(level);
      const double next = std::sqrt(2.0 / (l + 1.0)) * q * cur - std::sqrt(l / (l + 1.0)) * prev;
      prev = cur;
      cur = next;
    }
  }
  return SampledWavefunction::normalize(dq, std::move(amps));
}

SampledWavefunction fock_state(std::size_t n_grid, double dq, unsigned number) {
  cvec weights(number + 1, 0.0);
  weights[number] = 1.0;
  return fock_superposition(n_grid, dq, weights);
}

SampledWavefunction coherent_state(std::size_t n_grid, double dq, double mean_x, double mean_p) {
  return SampledWavefunction::from_function(n_grid, dq, [&](double q) {
    const double d = q - mean_x;
    return std::exp(-0.5 * d * d + 1i * mean_p * q);
  });
}

SampledWavefunction squeezed_state(std::size_t n_grid, double dq, double var_x) {
  if (!(var_x > 0.0)) {
    throw InvalidInput("variance must be positive");
  }
  return SampledWavefunction::from_function(
      n_grid, dq, [&](double q) { return std::complex<double>(std::exp(-q * q / (4.0 * var_x))); });
}

}  // namespace mubcv
