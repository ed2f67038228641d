#include "latmax/simulator.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <random>
#include <string>

#include "latmax/brown_resnick.hpp"
#include "latmax/errors.hpp"

namespace latmax {

Matrix gaussian_correlation(const SimSpec& spec) {
  const auto n = spec.coords.rows();
  Matrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double h = (spec.coords.row(i) - spec.coords.row(j)).norm();
      K(i, j) = cov_value(spec.cov, h);
      K(j, i) = K(i, j);
    }
  }
  return K;
}

FrechetMatrix simulate_field(const SimSpec& spec) {
  const int n = static_cast<int>(spec.coords.rows());
  if (n < 1) throw OutOfRange("simulate_field: no points");
  if (spec.replicates < 1) throw OutOfRange("simulate_field: need p >= 1");
  if (!(spec.sigma > 0.0)) throw OutOfRange("simulate_field: sigma must be positive");

  Matrix K = gaussian_correlation(spec);
  // Eigendecomposition instead of Cholesky: exact correlation matrices can
  // be singular (coincident points), and clamping negative eigenvalues keeps
  // perfectly dependent components bit-for-bit identical.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(K);
  if (eig.info() != Eigen::Success)
    throw SingularCovariance("simulate_field: covariance factorization failed");
  Matrix L = eig.eigenvectors() *
             eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  const double sigma = spec.sigma;
  const double drift = 0.5 * sigma * sigma;
  // An atom eta can only alter the running maxima while
  // eta * exp(sigma w_max - sigma^2/2) exceeds their current minimum.
  const double envelope = std::exp(sigma * spec.w_max - drift);

  FrechetMatrix out;
  out.values.resize(spec.replicates, n);
  out.station_ids.reserve(n);
  for (int i = 0; i < n; ++i) out.station_ids.push_back("s" + std::to_string(i));

  Vector gauss(n), w(n);
  for (int rep = 0; rep < spec.replicates; ++rep) {
    // Independent per-replicate streams: deterministic for a fixed seed
    // regardless of how replicates are scheduled.
    std::seed_seq seq{spec.seed, static_cast<std::uint64_t>(rep)};
    std::mt19937_64 rng(seq);
    std::exponential_distribution<double> expo(1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    Vector maxima = Vector::Zero(n);
    double arrival = 0.0;
    for (int atom = 0; atom < spec.truncation; ++atom) {
      arrival += expo(rng);
      double eta = 1.0 / arrival;
      if (atom > 0 && eta * envelope < maxima.minCoeff()) break;
      for (int i = 0; i < n; ++i) gauss[i] = normal(rng);
      w.noalias() = L * gauss;
      for (int i = 0; i < n; ++i) {
        double v = eta * std::exp(sigma * w[i] - drift);
        if (v > maxima[i]) maxima[i] = v;
      }
    }
    out.values.row(rep) = maxima;
  }
  return out;
}

Matrix true_theta_matrix(const SimSpec& spec) {
  Matrix K = gaussian_correlation(spec);
  const auto n = K.rows();
  Matrix theta = Matrix::Ones(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      theta(i, j) = extremal_coefficient(spec.sigma, K(i, j));
      theta(j, i) = theta(i, j);
    }
  return theta;
}

}  // namespace latmax
