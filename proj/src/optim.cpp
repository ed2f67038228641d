#include "latmax/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace latmax {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& start, const SimplexOptions& opts) {
  const int n = static_cast<int>(start.size());
  const int max_iter = opts.max_iterations > 0 ? opts.max_iterations : 500 * n;

  // Adaptive coefficients (scale with dimension).
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / n;
  const double gamma = 0.75 - 0.5 / n;
  const double delta = 1.0 - 1.0 / n;

  SimplexResult res;
  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> fv(n + 1);
  for (int i = 0; i < n; ++i) {
    double h = opts.initial_step * (std::abs(start[i]) > 1e-8 ? std::abs(start[i]) : 1.0);
    simplex[i + 1][i] += h;
  }
  for (int i = 0; i <= n; ++i) {
    fv[i] = f(simplex[i]);
    ++res.evaluations;
  }

  std::vector<int> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    int best = order[0], worst = order[n], second = order[n - 1];

    if (std::isfinite(fv[best]) && std::isfinite(fv[second]) &&
        fv[second] - fv[best] < opts.f_tolerance) {
      res.converged = true;
      res.x = simplex[best];
      res.fmin = fv[best];
      return res;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (int i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (int j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    }
    for (int j = 0; j < n; ++j) centroid[j] /= n;

    for (int j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - simplex[worst][j]);
    double fr = f(xr);
    ++res.evaluations;

    if (fr < fv[order[0]]) {
      for (int j = 0; j < n; ++j) xe[j] = centroid[j] + beta * (xr[j] - centroid[j]);
      double fe = f(xe);
      ++res.evaluations;
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
    } else {
      bool outside = fr < fv[worst];
      if (outside) {
        for (int j = 0; j < n; ++j) xc[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
      } else {
        for (int j = 0; j < n; ++j) xc[j] = centroid[j] - gamma * (centroid[j] - simplex[worst][j]);
      }
      double fc = f(xc);
      ++res.evaluations;
      if (fc < std::min(fr, fv[worst])) {
        simplex[worst] = xc;
        fv[worst] = fc;
      } else {
        // Shrink toward the best vertex.
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (int j = 0; j < n; ++j)
            simplex[i][j] = simplex[best][j] + delta * (simplex[i][j] - simplex[best][j]);
          fv[i] = f(simplex[i]);
          ++res.evaluations;
        }
      }
    }
  }

  int best = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = simplex[best];
  res.fmin = fv[best];
  res.converged = false;
  return res;
}

double golden_section(const std::function<double(double)>& f, double a, double b,
                      double tol, int max_iter) {
  const double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace latmax
