#ifndef LATMAX_NORMAL_HPP
#define LATMAX_NORMAL_HPP

namespace latmax {

// Standard normal density, CDF and quantile. The upper-tail variants keep
// full relative accuracy far in the tail, where 1 - Phi(x) underflows the
// precision of a plain probability.

double norm_pdf(double x);
double norm_cdf(double x);

// P(X > x), computed via erfc so that tiny tail masses keep relative accuracy.
double norm_sf(double x);

// Inverse CDF on (0, 1).
double norm_quantile(double p);

// x >= 0 such that norm_sf(x) = q, for q in (0, 0.5]. Accurate for tiny q.
double norm_quantile_from_sf(double q);

}  // namespace latmax

#endif
