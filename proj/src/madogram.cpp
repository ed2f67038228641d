#include "latmax/madogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "latmax/errors.hpp"

namespace latmax {

namespace {
// Empirical CDF values rank/(p+1), average ranks on ties.
std::vector<double> plotting_positions(const Vector& col) {
  const int p = static_cast<int>(col.size());
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return col[a] < col[b]; });
  std::vector<double> pos(p);
  int i = 0;
  while (i < p) {
    int j = i;
    while (j + 1 < p && col[order[j + 1]] == col[order[i]]) ++j;
    double avg_rank = 0.5 * (i + j) + 1.0;  // 1-based
    for (int t = i; t <= j; ++t) pos[order[t]] = avg_rank / (p + 1.0);
    i = j + 1;
  }
  return pos;
}
}  // namespace

double f_madogram_theta(const Vector& col_i, const Vector& col_j) {
  if (col_i.size() != col_j.size())
    throw DimensionMismatch("f_madogram_theta: column lengths differ");
  const int p = static_cast<int>(col_i.size());
  if (p < 2) throw OutOfRange("f_madogram_theta: need at least 2 observations");

  auto fi = plotting_positions(col_i);
  auto fj = plotting_positions(col_j);
  double nu_f = 0.0;
  for (int k = 0; k < p; ++k) nu_f += std::abs(fi[k] - fj[k]);
  nu_f /= 2.0 * p;

  if (nu_f >= 0.5) return 2.0;
  double theta = (1.0 + 2.0 * nu_f) / (1.0 - 2.0 * nu_f);
  return std::clamp(theta, 1.0, 2.0);
}

ExtremalMatrix extremal_matrix(const FrechetMatrix& data) {
  const int n = data.n_stations();
  ExtremalMatrix out;
  out.station_ids = data.station_ids;
  out.theta_hat = Matrix::Ones(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double t = f_madogram_theta(data.values.col(i), data.values.col(j));
      out.theta_hat(i, j) = t;
      out.theta_hat(j, i) = t;
    }
  return out;
}

double theta_mse(const Matrix& model_theta, const ExtremalMatrix& theta_hat) {
  const auto n = theta_hat.theta_hat.rows();
  if (model_theta.rows() != n || model_theta.cols() != n)
    throw DimensionMismatch("theta_mse: dimension mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double d = model_theta(i, j) - theta_hat.theta_hat(i, j);
      s += d * d;
    }
  return s / static_cast<double>(n * n);
}

}  // namespace latmax
