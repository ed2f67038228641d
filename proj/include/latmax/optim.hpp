#ifndef LATMAX_OPTIM_HPP
#define LATMAX_OPTIM_HPP

#include <functional>
#include <vector>

namespace latmax {

struct SimplexResult {
  std::vector<double> x;
  double fmin = 0.0;
  bool converged = false;
  int evaluations = 0;
};

struct SimplexOptions {
  int max_iterations = 0;   // 0 -> 500 * dim
  double f_tolerance = 1e-8;
  double initial_step = 0.1;
};

// Derivative-free Nelder-Mead minimization with adaptive coefficients.
// The objective may return +inf to reject a point (box constraints).
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& start, const SimplexOptions& opts = {});

// Golden-section minimization of a unimodal function on [a, b].
// Returns the abscissa of the minimum; tol is on the bracket width.
double golden_section(const std::function<double(double)>& f, double a, double b,
                      double tol, int max_iter = 200);

}  // namespace latmax

#endif
