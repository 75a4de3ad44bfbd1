#include "mubcv/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "mubcv/error.hpp"
#include "mubcv/quadrature.hpp"
#include "mubcv/random.hpp"

namespace mubcv {

namespace {

constexpr double kSymmetryTolerance = 1e-10;

Eigen::Matrix2d rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, s, -s, c;
  return r;
}

void require_dimension(const GaussianState& state, const LinearObservable& obs) {
  if (obs.coeffs.size() != state.mean().size()) {
    throw InvalidInput("observable has " + std::to_string(obs.coeffs.size()) +
                       " coefficients but the state has " +
                       std::to_string(state.mean().size()) + " phase-space coordinates");
  }
}

// Applies a symplectic S to (mean, cov) in place.
void apply(const Eigen::MatrixXd& s, Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
  mean = s * mean;
  cov = s * cov * s.transpose();
}

Eigen::MatrixXd local_block(std::size_t n_modes, std::size_t mode, const Eigen::Matrix2d& block) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  s.block<2, 2>(2 * mode, 2 * mode) = block;
  return s;
}

// Passive two-mode rotation mixing modes a and b by angle t (same on x and p).
Eigen::MatrixXd mixer(std::size_t n_modes, std::size_t a, std::size_t b, double t) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  const double c = std::cos(t);
  const double sn = std::sin(t);
  for (std::size_t k = 0; k < 2; ++k) {
    const std::size_t ia = 2 * a + k;
    const std::size_t ib = 2 * b + k;
    s(ia, ia) = c;
    s(ia, ib) = sn;
    s(ib, ia) = -sn;
    s(ib, ib) = c;
  }
  return s;
}

}  // namespace

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() == 0 || mean_.size() % 2 != 0) {
    throw InvalidInput("mean must have even, non-zero length (x, p per mode)");
  }
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    throw InvalidInput("covariance must be " + std::to_string(mean_.size()) + "x" +
                       std::to_string(mean_.size()));
  }
  if (!mean_.allFinite() || !cov_.allFinite()) {
    throw InvalidInput("state entries must be finite");
  }
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw InvalidInput("covariance matrix is not symmetric");
  }
  if ((cov_.diagonal().array() <= 0.0).any()) {
    throw InvalidInput("covariance diagonal must be strictly positive");
  }
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
}

GaussianState GaussianState::vacuum(std::size_t n_modes) {
  if (n_modes == 0) {
    throw InvalidInput("n_modes must be positive");
  }
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return GaussianState(Eigen::VectorXd::Zero(dim), 0.5 * Eigen::MatrixXd::Identity(dim, dim));
}

GaussianState GaussianState::diagonal(double var_x, double var_p) {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
  cov(0, 0) = var_x;
  cov(1, 1) = var_p;
  return GaussianState(Eigen::VectorXd::Zero(2), cov);
}

bool GaussianState::is_physical(double tol) const {
  using namespace std::complex_literals;
  const Eigen::MatrixXcd h =
      cov_.cast<std::complex<double>>() + 0.5i * symplectic_form(n_modes()).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -tol;
}

Eigen::VectorXd GaussianState::symplectic_eigenvalues() const {
  // Eigenvalues of Omega * cov are +/- i nu_k.
  const Eigen::MatrixXd m = symplectic_form(n_modes()) * cov_;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  std::vector<double> magnitudes;
  magnitudes.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    magnitudes.push_back(std::abs(solver.eigenvalues()[k]));
  }
  std::sort(magnitudes.begin(), magnitudes.end());
  Eigen::VectorXd nu(static_cast<Eigen::Index>(n_modes()));
  for (std::size_t k = 0; k < n_modes(); ++k) {
    nu[static_cast<Eigen::Index>(k)] = 0.5 * (magnitudes[2 * k] + magnitudes[2 * k + 1]);
  }
  return nu;
}

GaussianState GaussianState::mode(std::size_t index) const {
  if (index >= n_modes()) {
    throw InvalidInput("mode index out of range");
  }
  const auto i = static_cast<Eigen::Index>(2 * index);
  return GaussianState(mean_.segment<2>(i), cov_.block<2, 2>(i, i));
}

LinearObservable::LinearObservable(Eigen::VectorXd c, std::string name)
    : coeffs(std::move(c)), label(std::move(name)) {
  if (coeffs.size() == 0 || coeffs.size() % 2 != 0) {
    throw InvalidInput("observable needs an even, non-zero number of coefficients");
  }
  if (!coeffs.allFinite() || (coeffs.array() == 0.0).all()) {
    throw InvalidInput("observable coefficients must be finite and not all zero");
  }
}

LinearObservable LinearObservable::quadrature(std::size_t n_modes, std::size_t mode, double theta,
                                              std::string name) {
  if (mode >= n_modes) {
    throw InvalidInput("mode index out of range");
  }
  const auto axis = axis_coefficients(theta);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * n_modes));
  c[static_cast<Eigen::Index>(2 * mode)] = axis.cx;
  c[static_cast<Eigen::Index>(2 * mode + 1)] = axis.cp;
  return LinearObservable(std::move(c), std::move(name));
}

Eigen::MatrixXd symplectic_form(std::size_t n_modes) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  return omega;
}

double symplectic_product(const LinearObservable& a, const LinearObservable& b) {
  if (a.coeffs.size() != b.coeffs.size()) {
    throw InvalidInput("observables act on different numbers of modes");
  }
  const auto n = static_cast<std::size_t>(a.coeffs.size() / 2);
  return a.coeffs.dot(symplectic_form(n) * b.coeffs);
}

double observable_mean(const GaussianState& state, const LinearObservable& obs) {
  require_dimension(state, obs);
  return obs.coeffs.dot(state.mean());
}

double observable_variance(const GaussianState& state, const LinearObservable& obs) {
  require_dimension(state, obs);
  return obs.coeffs.dot(state.cov() * obs.coeffs);
}

double observable_covariance(const GaussianState& state, const LinearObservable& a,
                             const LinearObservable& b) {
  require_dimension(state, a);
  require_dimension(state, b);
  return a.coeffs.dot(state.cov() * b.coeffs);
}

GaussianState rotate_mode(const GaussianState& state, std::size_t mode, double theta) {
  if (mode >= state.n_modes()) {
    throw InvalidInput("mode index out of range");
  }
  if (!std::isfinite(theta)) {
    throw InvalidInput("angle must be finite");
  }
  Eigen::VectorXd mean = state.mean();
  Eigen::MatrixXd cov = state.cov();
  apply(local_block(state.n_modes(), mode, rotation(theta)), mean, cov);
  return GaussianState(std::move(mean), std::move(cov));
}

GaussianState direct_sum(const GaussianState& a, const GaussianState& b) {
  const Eigen::Index na = a.mean().size();
  const Eigen::Index nb = b.mean().size();
  Eigen::VectorXd mean(na + nb);
  mean << a.mean(), b.mean();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(na + nb, na + nb);
  cov.topLeftCorner(na, na) = a.cov();
  cov.bottomRightCorner(nb, nb) = b.cov();
  return GaussianState(std::move(mean), std::move(cov));
}

Eigen::MatrixXd sample_wigner(const GaussianState& state, std::size_t n_samples,
                              std::uint64_t seed) {
  if (n_samples == 0) {
    throw InvalidInput("n_samples must be at least 1");
  }
  if (!state.is_physical()) {
    throw InvalidInput("cannot sample the Wigner function of a non-physical state");
  }
  const Eigen::Index dim = state.mean().size();
  Eigen::MatrixXd factor;
  Eigen::LLT<Eigen::MatrixXd> llt(state.cov());
  if (llt.info() == Eigen::Success) {
    factor = llt.matrixL();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(state.cov());
    factor = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  Rng rng(seed);
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(n_samples), dim);
  Eigen::VectorXd g(dim);
  for (Eigen::Index row = 0; row < samples.rows(); ++row) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      g[k] = rng.normal();
    }
    samples.row(row) = (state.mean() + factor * g).transpose();
  }
  return samples;
}

GaussianState random_physical_state(std::size_t n_modes, std::uint64_t seed,
                                    const RandomStateOptions& options) {
  if (n_modes == 0) {
    throw InvalidInput("n_modes must be positive");
  }
  Rng rng(seed);
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Eigen::VectorXd mean(dim);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t k = 0; k < n_modes; ++k) {
    const double nu =
        rng.uniform() < options.pure_fraction ? 0.5 : 0.5 + options.max_excess_noise * rng.uniform();
    cov(static_cast<Eigen::Index>(2 * k), static_cast<Eigen::Index>(2 * k)) = nu;
    cov(static_cast<Eigen::Index>(2 * k + 1), static_cast<Eigen::Index>(2 * k + 1)) = nu;
  }
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim);

  auto local_layer = [&] {
    for (std::size_t k = 0; k < n_modes; ++k) {
      const double r = options.max_squeeze * rng.uniform(-1.0, 1.0);
      Eigen::Matrix2d squeeze = Eigen::Matrix2d::Zero();
      squeeze(0, 0) = std::exp(-r);
      squeeze(1, 1) = std::exp(r);
      apply(local_block(n_modes, k, rotation(rng.uniform(0.0, kTwoPi))), zero, cov);
      apply(local_block(n_modes, k, squeeze), zero, cov);
      apply(local_block(n_modes, k, rotation(rng.uniform(0.0, kTwoPi))), zero, cov);
    }
  };

  local_layer();
  for (std::size_t a = 0; a + 1 < n_modes; ++a) {
    for (std::size_t b = a + 1; b < n_modes; ++b) {
      apply(mixer(n_modes, a, b, rng.uniform(0.0, kTwoPi)), zero, cov);
    }
  }
  if (n_modes > 1) {
    local_layer();
  }
  for (Eigen::Index k = 0; k < dim; ++k) {
    mean[k] = options.max_displacement * rng.uniform(-1.0, 1.0);
  }
  cov = 0.5 * (cov + cov.transpose()).eval();
  return GaussianState(std::move(mean), std::move(cov));
}

GaussianState random_product_state(std::size_t n_modes, std::uint64_t seed,
                                   const RandomStateOptions& options) {
  if (n_modes == 0) {
    throw InvalidInput("n_modes must be positive");
  }
  GaussianState state = random_physical_state(1, substream_seed(seed, 0), options);
  for (std::size_t k = 1; k < n_modes; ++k) {
    state = direct_sum(state, random_physical_state(1, substream_seed(seed, k), options));
  }
  return state;
}

}  // namespace mubcv
