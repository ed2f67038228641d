#include "latmax/kriging.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "latmax/errors.hpp"
#include "latmax/optim.hpp"

namespace latmax {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix correlation_matrix(const Matrix& X, const Vector& ranges, double nugget) {
  const auto n = X.rows();
  Matrix C(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    C(i, i) = 1.0 + nugget;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (Eigen::Index l = 0; l < X.cols(); ++l)
        s += std::abs(X(i, l) - X(j, l)) / ranges[l];
      C(i, j) = std::exp(-s);
      C(j, i) = C(i, j);
    }
  }
  return C;
}

// Concentrated negative log-likelihood: mean and variance profiled out.
double profile_nll(const Matrix& X, const Vector& y, const Vector& ranges, double nugget,
                   double* out_mean = nullptr, double* out_var = nullptr,
                   Vector* out_weights = nullptr) {
  const auto n = X.rows();
  Matrix C = correlation_matrix(X, ranges, nugget);
  Eigen::LLT<Matrix> llt(C);
  if (llt.info() != Eigen::Success) return kInf;

  Vector ones = Vector::Ones(n);
  Vector Ci_y = llt.solve(y);
  Vector Ci_1 = llt.solve(ones);
  double denom = ones.dot(Ci_1);
  if (!(denom > 0.0)) return kInf;
  double mean = ones.dot(Ci_y) / denom;
  Vector resid = y - mean * ones;
  double var = resid.dot(llt.solve(resid)) / n;
  if (!(var > 0.0)) return kInf;

  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i));
  double nll = 0.5 * (n * std::log(var) + logdet);
  if (out_mean) *out_mean = mean;
  if (out_var) *out_var = var;
  if (out_weights) *out_weights = llt.solve(resid);
  return nll;
}
}  // namespace

double KrigingModel::predict(const Vector& x) const {
  if (constant) return mean;
  double acc = mean;
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index l = 0; l < inputs.cols(); ++l)
      s += std::abs(x[l] - inputs(i, l)) / ranges[l];
    acc += std::exp(-s) * weights[i];
  }
  return acc;
}

KrigingModel fit_kriging(const Matrix& inputs, const Vector& observations,
                         const KrigingFitOptions& opts) {
  const auto n = inputs.rows();
  const auto q = inputs.cols();
  if (observations.size() != n)
    throw DimensionMismatch("fit_kriging: observation count mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if ((inputs.row(i) - inputs.row(j)).norm() == 0.0)
        throw SingularCovariance("fit_kriging: coincident input points");

  KrigingModel model;
  model.inputs = inputs;
  model.observations = observations;
  model.nugget = opts.nugget;

  double y_mean = observations.mean();
  double y_sd = std::sqrt((observations.array() - y_mean).square().sum() /
                          std::max<Eigen::Index>(1, n - 1));
  if (y_sd < 1e-12 * (1.0 + std::abs(y_mean))) {
    model.constant = true;
    model.mean = y_mean;
    model.ranges = Vector::Ones(q);
    model.weights = Vector::Zero(n);
    return model;
  }

  // Coordinate spans set the scale of the range starting points.
  Vector span(q);
  for (Eigen::Index l = 0; l < q; ++l) {
    double s = inputs.col(l).maxCoeff() - inputs.col(l).minCoeff();
    span[l] = s > 0.0 ? s : 1.0;
  }

  auto objective = [&](const std::vector<double>& log_r) {
    Vector r(q);
    for (Eigen::Index l = 0; l < q; ++l) {
      if (log_r[l] < opts.log_range_lo || log_r[l] > opts.log_range_hi) return kInf;
      r[l] = std::exp(log_r[l]);
    }
    return profile_nll(inputs, observations, r, opts.nugget);
  };

  const double multipliers[] = {0.5, 0.1, 1.5, 0.02, 5.0};
  SimplexOptions nm_opts;
  nm_opts.f_tolerance = 1e-7;
  nm_opts.initial_step = 0.5;

  SimplexResult best;
  best.fmin = kInf;
  bool any_converged = false;
  for (int s = 0; s < opts.starts; ++s) {
    std::vector<double> start(q);
    for (Eigen::Index l = 0; l < q; ++l)
      start[l] = std::clamp(std::log(multipliers[s % 5] * span[l]),
                            opts.log_range_lo + 1e-6, opts.log_range_hi - 1e-6);
    SimplexResult r = nelder_mead(objective, start, nm_opts);
    any_converged = any_converged || r.converged;
    if (r.fmin < best.fmin) best = r;
  }
  if (!std::isfinite(best.fmin))
    throw NonConvergence("fit_kriging: likelihood not finite at any candidate");
  if (!any_converged) throw NonConvergence("fit_kriging: range optimizer did not converge");

  model.ranges.resize(q);
  for (Eigen::Index l = 0; l < q; ++l)
    model.ranges[l] = std::exp(std::clamp(best.x[l], opts.log_range_lo, opts.log_range_hi));
  profile_nll(inputs, observations, model.ranges, opts.nugget, &model.mean, &model.variance,
              &model.weights);
  return model;
}

WarpModel fit_warp(const StationSet& stations, const Embedding& emb,
                   const KrigingFitOptions& opts) {
  if (stations.size() != emb.size())
    throw DimensionMismatch("fit_warp: station/embedding size mismatch");
  if (stations.size() < emb.dim() + 2)
    throw InsufficientStations("fit_warp: need at least d + 2 stations");
  WarpModel model;
  model.stations = stations;
  model.embedding = emb;
  model.predictors.reserve(emb.dim());
  for (int c = 0; c < emb.dim(); ++c)
    model.predictors.push_back(fit_kriging(stations.coords, emb.coords.col(c), opts));
  return model;
}

Vector warp(const WarpModel& model, const Vector& location) {
  Vector y(model.dim());
  for (int c = 0; c < model.dim(); ++c) y[c] = model.predictors[c].predict(location);
  return y;
}

double model_cov(const WarpModel& model, const CovFunction& f, const Vector& loc_a,
                 const Vector& loc_b) {
  return cov_value(f, (warp(model, loc_a) - warp(model, loc_b)).norm());
}

}  // namespace latmax
