#pragma once

#include <array>
#include <complex>
#include <numbers>

namespace mubcv {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Below this |sin(theta_b - theta_a)| two axes are treated as parallel.
inline constexpr double kDegeneracyTolerance = 1e-12;

// Reduces an angle to [0, 2pi). Throws InvalidInput for non-finite input.
double reduce_angle(double theta);

struct AxisCoefficients {
  double cx;
  double cp;
};

// Direction of the rotated quadrature q_theta = cos(theta) x + sin(theta) p.
class QuadratureAxis {
 public:
  explicit QuadratureAxis(double theta);

  double theta() const noexcept { return theta_; }
  AxisCoefficients coefficients() const noexcept;

 private:
  double theta_;
};

// Three axes at offset, offset + 2pi/3, offset + 4pi/3. With offset 0 these
// are x, r and s.
class MubTriple {
 public:
  explicit MubTriple(double offset = 0.0);

  double offset() const noexcept { return offset_; }
  std::array<QuadratureAxis, 3> axes() const;

 private:
  double offset_;
};

AxisCoefficients axis_coefficients(double theta);

// |[q_a, q_b]| = |sin(theta_b - theta_a)|.
double commutator_magnitude(double theta_a, double theta_b);

// |<q_a | q_b>| = (2 pi |sin(theta_b - theta_a)|)^(-1/2). Throws
// DegenerateAxes when the axes are (anti)parallel.
double mub_overlap_magnitude(double theta_a, double theta_b);

// Eigenstate overlap <q'_{theta+theta_d} | q_theta>, i.e. the FRFT kernel
//   sqrt(i e^{i theta_d} / (2 pi |sin theta_d|))
//     * exp(i cot(theta_d)/2 (q^2 + q'^2) - i q q' / sin(theta_d)).
// The square root is the principal branch; the global phase is a convention,
// only the magnitude is physically meaningful.
std::complex<double> frft_kernel(double theta_d, double q, double q_prime);

// True iff all three pairwise overlap magnitudes agree within tol. Any
// degenerate pair yields false.
bool is_mub_triple(const std::array<double, 3>& thetas, double tol);

}  // namespace mubcv
