#include "latmax/ideal_cov.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>
#include <vector>

#include "latmax/brown_resnick.hpp"
#include "latmax/errors.hpp"
#include "latmax/optim.hpp"

namespace latmax {

IdealCovMatrix ideal_cov_method1(const ExtremalMatrix& theta_hat, double sigma,
                                 double epsilon) {
  if (!(sigma > 0.0)) throw OutOfRange("ideal_cov_method1: sigma must be positive");
  if (!(epsilon > 0.0) || epsilon >= 1.0)
    throw OutOfRange("ideal_cov_method1: epsilon must be in (0, 1)");
  const int n = theta_hat.size();
  IdealCovMatrix out;
  out.method = 1;
  out.sigma = sigma;
  out.epsilon = epsilon;
  out.K = Matrix::Ones(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double raw = cov_from_theta(sigma, theta_hat.theta_hat(i, j));
      double k = std::clamp(raw, epsilon, kCovCap);
      out.K(i, j) = k;
      out.K(j, i) = k;
    }
  return out;
}

namespace {
double best_pair_cov(const Vector& ci, const Vector& cj, double sigma, double epsilon) {
  auto negloglik = [&](double k) {
    return -pair_loglik(ci, cj, PairDependence::from_correlation(sigma, k));
  };
  // 50-point coarse grid guards against multimodality, then golden-section
  // refinement on the bracket around the best point.
  const int n_grid = 50;
  double best_k = epsilon, best_f = negloglik(epsilon);
  double step = (kCovCap - epsilon) / (n_grid - 1);
  for (int g = 1; g < n_grid; ++g) {
    double k = epsilon + g * step;
    double f = negloglik(k);
    if (f < best_f) {
      best_f = f;
      best_k = k;
    }
  }
  double lo = std::max(epsilon, best_k - step);
  double hi = std::min(kCovCap, best_k + step);
  double refined = golden_section(negloglik, lo, hi, 1e-5);
  return negloglik(refined) <= best_f ? refined : best_k;
}
}  // namespace

IdealCovMatrix ideal_cov_method2(const FrechetMatrix& data, double sigma, double epsilon) {
  if (!(sigma > 0.0)) throw OutOfRange("ideal_cov_method2: sigma must be positive");
  const int n = data.n_stations();
  IdealCovMatrix out;
  out.method = 2;
  out.sigma = sigma;
  out.epsilon = epsilon;
  out.K = Matrix::Ones(n, n);

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&](size_t t0, size_t t1) {
    try {
      for (size_t t = t0; t < t1; ++t) {
        auto [i, j] = pairs[t];
        double k = best_pair_cov(data.values.col(i), data.values.col(j), sigma, epsilon);
        out.K(i, j) = k;
        out.K(j, i) = k;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };

  unsigned n_threads = std::min<unsigned>(std::thread::hardware_concurrency(),
                                          static_cast<unsigned>(pairs.size()));
  if (n_threads <= 1) {
    work(0, pairs.size());
  } else {
    std::vector<std::thread> threads;
    size_t per = (pairs.size() + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
      size_t a = t * per, b = std::min(pairs.size(), a + per);
      if (a < b) threads.emplace_back(work, a, b);
    }
    for (auto& th : threads) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

Matrix ideal_distances(const IdealCovMatrix& K, const CovFunction& f) {
  return matrix_inverse_map(f, K.K);
}

std::vector<double> pair_loglik_profile(const Vector& col_i, const Vector& col_j,
                                        double sigma, const std::vector<double>& k_grid) {
  std::vector<double> out;
  out.reserve(k_grid.size());
  for (double k : k_grid)
    out.push_back(pair_loglik(col_i, col_j, PairDependence::from_correlation(sigma, k)));
  return out;
}

}  // namespace latmax
