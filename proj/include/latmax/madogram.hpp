#ifndef LATMAX_MADOGRAM_HPP
#define LATMAX_MADOGRAM_HPP

#include "latmax/types.hpp"

namespace latmax {

// n x n symmetric matrix of pairwise extremal-coefficient estimates,
// clamped to [1, 2], unit diagonal.
struct ExtremalMatrix {
  Matrix theta_hat;
  std::vector<std::string> station_ids;

  int size() const { return static_cast<int>(theta_hat.rows()); }
};

// F-madogram estimator for one pair of data columns. Rank-based (average
// ranks on ties, plotting position k/(p+1)), so invariant to monotone
// marginal transforms; the raw ratio is clamped into [1, 2].
double f_madogram_theta(const Vector& col_i, const Vector& col_j);

// All pairs of a data matrix.
ExtremalMatrix extremal_matrix(const FrechetMatrix& data);

// (1/n^2) sum over all (i, j), diagonal included, of (theta - theta_hat)^2.
double theta_mse(const Matrix& model_theta, const ExtremalMatrix& theta_hat);

}  // namespace latmax

#endif
