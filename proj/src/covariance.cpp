#include "latmax/covariance.hpp"

#include <cmath>

#include "latmax/errors.hpp"

namespace latmax {

CovFunction CovFunction::power_exponential(double alpha) {
  if (!(alpha > 0.0) || alpha > 2.0)
    throw OutOfRange("power_exponential: alpha must be in (0, 2]");
  return {CovKind::PowerExponential, alpha};
}

double cov_value(const CovFunction& f, double h) {
  if (h < 0.0) throw OutOfRange("cov_value: negative distance");
  switch (f.kind) {
    case CovKind::PowerExponential:
      return std::exp(-std::pow(h, f.alpha));
    case CovKind::Matern32:
      return (1.0 + h) * std::exp(-h);
    case CovKind::Matern52:
      return (1.0 + h + h * h / 3.0) * std::exp(-h);
  }
  return 0.0;
}

double cov_inverse(const CovFunction& f, double c) {
  if (!(c > 0.0) || c > 1.0) throw OutOfRange("cov_inverse: c must be in (0, 1]");
  if (c == 1.0) return 0.0;
  if (f.kind == CovKind::PowerExponential)
    return std::pow(-std::log(c), 1.0 / f.alpha);

  // Matern: grow the bracket geometrically, then bisect on the monotone k.
  double hi = 1.0;
  while (cov_value(f, hi) > c) {
    hi *= 2.0;
    if (hi > 1e8) throw NonConvergence("cov_inverse: bracket growth failed");
  }
  double lo = 0.0;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    if (cov_value(f, mid) > c)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Matrix matrix_inverse_map(const CovFunction& f, const Matrix& K) {
  const auto n = K.rows();
  if (K.cols() != n) throw DimensionMismatch("matrix_inverse_map: K not square");
  Matrix D = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double h = cov_inverse(f, K(i, j));
      D(i, j) = h;
      D(j, i) = h;
    }
  return D;
}

}  // namespace latmax
