#ifndef LATMAX_COVARIANCE_HPP
#define LATMAX_COVARIANCE_HPP

#include "latmax/types.hpp"

namespace latmax {

// Stationary isotropic correlation functions valid in arbitrary dimension:
// strictly decreasing from k(0) = 1, strictly positive, infinite support.
enum class CovKind { PowerExponential, Matern32, Matern52 };

struct CovFunction {
  CovKind kind = CovKind::PowerExponential;
  double alpha = 2.0;  // exponent in (0, 2], PowerExponential only

  static CovFunction power_exponential(double alpha);
  static CovFunction matern32() { return {CovKind::Matern32, 0.0}; }
  static CovFunction matern52() { return {CovKind::Matern52, 0.0}; }
};

// k(h) for h >= 0.
double cov_value(const CovFunction& f, double h);

// h >= 0 with cov_value(f, h) = c, for c in (0, 1]. Closed form for the
// power-exponential family, monotone bisection otherwise (tolerance 1e-12).
double cov_inverse(const CovFunction& f, double c);

// Elementwise cov_inverse of a symmetric unit-diagonal matrix of correlations.
Matrix matrix_inverse_map(const CovFunction& f, const Matrix& K);

}  // namespace latmax

#endif
