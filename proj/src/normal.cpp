#include "latmax/normal.hpp"

#include <cmath>
#include <limits>

#include "latmax/errors.hpp"

namespace latmax {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Acklam's rational approximation, ~1.15e-9 relative error; used only as a
// starting point for Newton refinement against erfc.
double quantile_estimate(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}
}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double norm_quantile_from_sf(double q) {
  if (!(q > 0.0) || q > 0.5) throw OutOfRange("norm_quantile_from_sf: q must be in (0, 0.5]");
  if (q == 0.5) return 0.0;
  double x = -quantile_estimate(q);  // x > 0, sf(x) = q
  // Newton on norm_sf; iterate in log space for tail stability:
  // g(x) = log(sf(x)) - log(q), g'(x) = -pdf(x)/sf(x).
  const double lq = std::log(q);
  for (int it = 0; it < 6; ++it) {
    double sf = norm_sf(x);
    if (sf <= 0.0) break;
    double step = (std::log(sf) - lq) * sf / norm_pdf(x);
    x += step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}

double norm_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw OutOfRange("norm_quantile: p must be in (0, 1)");
  if (p <= 0.5) return -norm_quantile_from_sf(p);
  return norm_quantile_from_sf(1.0 - p);
}

}  // namespace latmax
