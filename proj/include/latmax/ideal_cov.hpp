#ifndef LATMAX_IDEAL_COV_HPP
#define LATMAX_IDEAL_COV_HPP

#include "latmax/covariance.hpp"
#include "latmax/madogram.hpp"
#include "latmax/types.hpp"

namespace latmax {

inline const double kDefaultEpsilon = 0.049787068367863944;  // exp(-3)
inline constexpr double kCovCap = 0.99;

// Floored "ideal" covariance matrix: the MDS target before inversion.
struct IdealCovMatrix {
  Matrix K;
  int method = 1;
  double sigma = 0.0;
  double epsilon = kDefaultEpsilon;
};

// Method 1: invert the extremal-coefficient relation at the estimated
// theta-hat, then clamp off-diagonals into [epsilon, 0.99].
IdealCovMatrix ideal_cov_method1(const ExtremalMatrix& theta_hat, double sigma,
                                 double epsilon = kDefaultEpsilon);

// Method 2: per-pair argmax of the likelihood contribution over
// k in [epsilon, 0.99]; coarse grid then golden-section refinement.
IdealCovMatrix ideal_cov_method2(const FrechetMatrix& data, double sigma,
                                 double epsilon = kDefaultEpsilon);

// D* = k^{-1}(K*), elementwise.
Matrix ideal_distances(const IdealCovMatrix& K, const CovFunction& f);

// l_ij evaluated on a grid of correlations; the Fig.-2-style diagnostic and
// the brute-force reference for method 2.
std::vector<double> pair_loglik_profile(const Vector& col_i, const Vector& col_j,
                                        double sigma, const std::vector<double>& k_grid);

}  // namespace latmax

#endif
