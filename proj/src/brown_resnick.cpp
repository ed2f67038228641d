#include "latmax/brown_resnick.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "latmax/errors.hpp"
#include "latmax/normal.hpp"

namespace latmax {

PairDependence PairDependence::from_correlation(double sigma, double k) {
  if (!(sigma > 0.0)) throw OutOfRange("PairDependence: sigma must be positive");
  if (k > 1.0) throw OutOfRange("PairDependence: correlation above 1");
  return PairDependence(std::sqrt(0.5 * sigma * sigma * (1.0 - k)));
}

Theta extremal_coefficient(double sigma, double k) {
  if (!(sigma > 0.0)) throw OutOfRange("extremal_coefficient: sigma must be positive");
  if (k > 1.0) throw OutOfRange("extremal_coefficient: correlation above 1");
  double nu = std::sqrt(0.5 * sigma * sigma * (1.0 - k));
  double comp = 2.0 * norm_sf(nu);
  return Theta(2.0 - comp, comp);
}

double cov_from_theta(double sigma, const Theta& theta) {
  if (!(sigma > 0.0)) throw OutOfRange("cov_from_theta: sigma must be positive");
  if (theta.value < 1.0 || theta.value > 2.0 || theta.complement < 0.0)
    throw OutOfRange("cov_from_theta: theta must be in [1, 2]");
  if (theta.complement == 0.0) return -std::numeric_limits<double>::infinity();
  double nu = norm_quantile_from_sf(0.5 * theta.complement);
  return 1.0 - 2.0 * nu * nu / (sigma * sigma);
}

double cov_from_theta(double sigma, double theta) {
  return cov_from_theta(sigma, Theta(theta));
}

double bivariate_cdf(double z_i, double z_j, PairDependence nu) {
  if (!(z_i > 0.0) || !(z_j > 0.0)) throw OutOfRange("bivariate_cdf: z must be positive");
  if (nu.nu < 0.0) throw OutOfRange("bivariate_cdf: negative nu");
  if (nu.nu == 0.0) return std::exp(-1.0 / std::min(z_i, z_j));
  double w = std::log(z_j / z_i) / (2.0 * nu.nu);
  double V = norm_cdf(nu.nu + w) / z_i + norm_cdf(nu.nu - w) / z_j;
  return std::exp(-V);
}

double bivariate_log_density(double z_i, double z_j, PairDependence nu) {
  if (!(z_i > 0.0) || !(z_j > 0.0))
    throw OutOfRange("bivariate_log_density: z must be positive");
  if (nu.nu <= kNuFloor)
    throw DegenerateDependence("bivariate_log_density: nu at or below floor");

  const double v = nu.nu;
  const double w = std::log(z_j / z_i) / (2.0 * v);
  const double a1 = v + w, a2 = v - w;
  const double P1 = norm_cdf(a1), P2 = norm_cdf(a2);
  const double p1 = norm_pdf(a1), p2 = norm_pdf(a2);

  const double V = P1 / z_i + P2 / z_j;
  const double V1 = -P1 / (z_i * z_i) - p1 / (2.0 * v * z_i * z_i) + p2 / (2.0 * v * z_i * z_j);
  const double V2 = -P2 / (z_j * z_j) - p2 / (2.0 * v * z_j * z_j) + p1 / (2.0 * v * z_i * z_j);
  const double V12 = -p1 / (2.0 * v * z_i * z_i * z_j) + a1 * p1 / (4.0 * v * v * z_i * z_i * z_j) +
                     a2 * p2 / (4.0 * v * v * z_i * z_j * z_j) - p2 / (2.0 * v * z_i * z_j * z_j);

  const double curvature = V1 * V2 - V12;
  if (!(curvature > 0.0)) return -std::numeric_limits<double>::infinity();
  return -V + std::log(curvature);
}

double pair_loglik(const Vector& col_i, const Vector& col_j, PairDependence nu) {
  if (col_i.size() != col_j.size())
    throw DimensionMismatch("pair_loglik: column lengths differ");
  double s = 0.0;
  for (Eigen::Index k = 0; k < col_i.size(); ++k)
    s += bivariate_log_density(col_i[k], col_j[k], nu);
  return s;
}

double pairwise_loglik(const FrechetMatrix& data, const Matrix& cov, double sigma) {
  const int n = data.n_stations();
  if (cov.rows() != n || cov.cols() != n)
    throw DimensionMismatch("pairwise_loglik: cov dimension mismatch");

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  // Fixed-size chunks summed in pair-index order keep the reduction
  // bit-reproducible for any thread count.
  const size_t chunk = 64;
  const size_t n_chunks = (pairs.size() + chunk - 1) / chunk;
  std::vector<double> partial(n_chunks, 0.0);
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&](size_t c0, size_t c1) {
    try {
      for (size_t c = c0; c < c1; ++c) {
        double s = 0.0;
        size_t lo = c * chunk, hi = std::min(pairs.size(), lo + chunk);
        for (size_t t = lo; t < hi; ++t) {
          auto [i, j] = pairs[t];
          auto nu = PairDependence::from_correlation(sigma, cov(i, j));
          s += pair_loglik(data.values.col(i), data.values.col(j), nu);
        }
        partial[c] = s;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };

  unsigned n_threads = std::min<unsigned>(std::thread::hardware_concurrency(),
                                          static_cast<unsigned>(n_chunks));
  if (n_threads <= 1) {
    work(0, n_chunks);
  } else {
    std::vector<std::thread> threads;
    size_t per = (n_chunks + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
      size_t c0 = t * per, c1 = std::min(n_chunks, c0 + per);
      if (c0 < c1) threads.emplace_back(work, c0, c1);
    }
    for (auto& th : threads) th.join();
  }
  if (error) std::rethrow_exception(error);

  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace latmax
