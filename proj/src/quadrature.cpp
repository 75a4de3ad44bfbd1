#include "mubcv/quadrature.hpp"

#include <cmath>

#include "mubcv/error.hpp"

namespace mubcv {

namespace {

void require_finite(double theta) {
  if (!std::isfinite(theta)) {
    throw InvalidInput("angle must be finite");
  }
}

double checked_sin_difference(double theta_a, double theta_b) {
  require_finite(theta_a);
  require_finite(theta_b);
  const double s = std::sin(theta_b - theta_a);
  if (std::abs(s) < kDegeneracyTolerance) {
    throw DegenerateAxes("quadrature axes are parallel or antiparallel");
  }
  return s;
}

}  // namespace

double reduce_angle(double theta) {
  require_finite(theta);
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) {
    r += kTwoPi;
  }
  // fmod of a tiny negative angle can round up to exactly 2pi.
  if (r >= kTwoPi) {
    r = 0.0;
  }
  return r;
}

QuadratureAxis::QuadratureAxis(double theta) : theta_(reduce_angle(theta)) {}

AxisCoefficients QuadratureAxis::coefficients() const noexcept {
  return {std::cos(theta_), std::sin(theta_)};
}

MubTriple::MubTriple(double offset) : offset_(reduce_angle(offset)) {}

std::array<QuadratureAxis, 3> MubTriple::axes() const {
  return {QuadratureAxis(offset_), QuadratureAxis(offset_ + kTwoPi / 3.0),
          QuadratureAxis(offset_ + 2.0 * kTwoPi / 3.0)};
}

AxisCoefficients axis_coefficients(double theta) {
  require_finite(theta);
  return {std::cos(theta), std::sin(theta)};
}

double commutator_magnitude(double theta_a, double theta_b) {
  require_finite(theta_a);
  require_finite(theta_b);
  return std::abs(std::sin(theta_b - theta_a));
}

double mub_overlap_magnitude(double theta_a, double theta_b) {
  const double s = checked_sin_difference(theta_a, theta_b);
  return 1.0 / std::sqrt(kTwoPi * std::abs(s));
}

std::complex<double> frft_kernel(double theta_d, double q, double q_prime) {
  const double s = checked_sin_difference(0.0, theta_d);
  require_finite(q);
  require_finite(q_prime);
  using namespace std::complex_literals;
  const double cot = std::cos(theta_d) / s;
  const std::complex<double> prefactor =
      std::sqrt(1i * std::exp(1i * theta_d) / (kTwoPi * std::abs(s)));
  const double phase = 0.5 * cot * (q * q + q_prime * q_prime) - q * q_prime / s;
  return prefactor * std::exp(1i * phase);
}

bool is_mub_triple(const std::array<double, 3>& thetas, double tol) {
  if (!(tol > 0.0)) {
    throw InvalidInput("tolerance must be positive");
  }
  std::array<double, 3> overlaps{};
  try {
    overlaps[0] = mub_overlap_magnitude(thetas[0], thetas[1]);
    overlaps[1] = mub_overlap_magnitude(thetas[0], thetas[2]);
    overlaps[2] = mub_overlap_magnitude(thetas[1], thetas[2]);
  } catch (const DegenerateAxes&) {
    return false;
  }
  return std::abs(overlaps[0] - overlaps[1]) <= tol && std::abs(overlaps[0] - overlaps[2]) <= tol &&
         std::abs(overlaps[1] - overlaps[2]) <= tol;
}

}  // namespace mubcv
