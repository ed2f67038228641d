#ifndef LATMAX_BROWN_RESNICK_HPP
#define LATMAX_BROWN_RESNICK_HPP

#include "latmax/types.hpp"

namespace latmax {

// Pairwise extremal coefficient of the geometric Gaussian (Brown-Resnick)
// model. theta = 2 Phi(nu) lives in [1, 2); near independence it crowds the
// upper endpoint, so the value is carried together with its complement
// 2 - theta at full relative accuracy. Converts implicitly to the plain
// coefficient for consumers that only need the value.
struct Theta {
  double value;       // 2 Phi(nu)
  double complement;  // 2 - value = 2 Phi(-nu), kept accurate in the tail

  Theta() : value(1.0), complement(1.0) {}
  explicit Theta(double theta) : value(theta), complement(2.0 - theta) {}
  Theta(double theta, double comp) : value(theta), complement(comp) {}
  operator double() const { return value; }
};

// nu_ij = sqrt(sigma^2 (1 - k) / 2), the dependence scale of a station pair.
struct PairDependence {
  double nu;
  explicit PairDependence(double nu_) : nu(nu_) {}
  static PairDependence from_correlation(double sigma, double k);
};

// theta = 2 Phi(sqrt(sigma^2 (1 - k) / 2)); equals 1 iff k = 1.
Theta extremal_coefficient(double sigma, double k);

// Inverse of the above: k = 1 - (2/sigma^2) (Phi^{-1}(theta/2))^2.
// Returns -inf at theta = 2 (downstream flooring applies).
double cov_from_theta(double sigma, const Theta& theta);
double cov_from_theta(double sigma, double theta);

// Bivariate CDF F(z_i, z_j) of the model (Husler-Reiss type exponent).
double bivariate_cdf(double z_i, double z_j, PairDependence nu);

// log of the mixed second derivative of bivariate_cdf, in closed form.
double bivariate_log_density(double z_i, double z_j, PairDependence nu);

// Minimum admissible nu; below it the pair is treated as degenerate.
inline constexpr double kNuFloor = 1e-6;

// Sum over pairs i<j and years of log f_ij at the data, for a correlation
// matrix cov (symmetric, unit diagonal) and Brown-Resnick parameter sigma.
// Deterministic regardless of thread count.
double pairwise_loglik(const FrechetMatrix& data, const Matrix& cov, double sigma);

// Same sum restricted to a single pair of data columns; building block for
// the ideal-covariance search.
double pair_loglik(const Vector& col_i, const Vector& col_j, PairDependence nu);

}  // namespace latmax

#endif
