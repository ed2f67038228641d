#include "latmax/gev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "latmax/errors.hpp"
#include "latmax/optim.hpp"

namespace latmax {

namespace {
constexpr double kXiZero = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Hosking's probability-weighted-moment estimator.
GevParams pwm_init(const Vector& series) {
  const int p = static_cast<int>(series.size());
  std::vector<double> x(series.data(), series.data() + p);
  std::sort(x.begin(), x.end());
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (int k = 0; k < p; ++k) {
    b0 += x[k];
    b1 += x[k] * k / (p - 1.0);
    b2 += x[k] * k * (k - 1.0) / ((p - 1.0) * (p - 2.0));
  }
  b0 /= p;
  b1 /= p;
  b2 /= p;

  double c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - std::log(2.0) / std::log(3.0);
  double kappa = 7.8590 * c + 2.9554 * c * c;  // kappa = -xi
  GevParams init;
  if (std::abs(kappa) < 1e-6) {
    init.sigma = (2.0 * b1 - b0) / std::log(2.0);
    init.mu = b0 - 0.57721566490153286 * init.sigma;
    init.xi = 0.0;
  } else {
    double g = std::tgamma(1.0 + kappa);
    init.sigma = (2.0 * b1 - b0) * kappa / (g * (1.0 - std::pow(2.0, -kappa)));
    init.mu = b0 + init.sigma * (g - 1.0) / kappa;
    init.xi = -kappa;
  }
  if (!(init.sigma > 0.0)) init.sigma = std::max(1e-8, 0.5 * (b0 - x.front()));
  return init;
}

double pooled_negloglik(const std::vector<Vector>& cols, const std::vector<double>& theta,
                        const XiBounds& bounds) {
  double xi = theta[0];
  if (xi < bounds.lo || xi > bounds.hi) return kInf;
  double nll = 0.0;
  for (size_t s = 0; s < cols.size(); ++s) {
    GevParams prm{theta[1 + 2 * s], std::exp(theta[2 + 2 * s]), xi};
    double ll = gev_loglik(cols[s], prm);
    if (!std::isfinite(ll)) return kInf;
    nll -= ll;
  }
  return nll;
}

GevParams fit_pooled_core(const std::vector<Vector>& cols, const XiBounds& bounds) {
  for (const auto& c : cols) {
    if (c.size() < 2) throw DegenerateSample("gev fit: series too short");
    if (c.maxCoeff() == c.minCoeff())
      throw DegenerateSample("gev fit: constant series");
  }

  const int dim = 1 + 2 * static_cast<int>(cols.size());
  std::vector<double> init(dim);
  double xi0 = 0.0;
  for (size_t s = 0; s < cols.size(); ++s) {
    GevParams prm = pwm_init(cols[s]);
    init[1 + 2 * s] = prm.mu;
    init[2 + 2 * s] = std::log(prm.sigma);
    xi0 += prm.xi;
  }
  xi0 /= static_cast<double>(cols.size());
  double margin = 0.05 * (bounds.hi - bounds.lo);
  init[0] = std::clamp(xi0, bounds.lo + margin, bounds.hi - margin);

  auto objective = [&](const std::vector<double>& th) {
    return pooled_negloglik(cols, th, bounds);
  };

  SimplexOptions opts;
  opts.f_tolerance = 1e-8;
  opts.max_iterations = 2000 * dim;

  std::mt19937_64 rng(12345);  // fixed: restarts are part of the deterministic fit
  std::normal_distribution<double> gauss(0.0, 1.0);

  SimplexResult best;
  best.fmin = kInf;
  bool any_converged = false;
  for (int restart = 0; restart < 5; ++restart) {
    std::vector<double> start = init;
    if (restart > 0) {
      for (size_t s = 0; s < cols.size(); ++s) {
        start[1 + 2 * s] += 0.05 * std::exp(init[2 + 2 * s]) * gauss(rng);
        start[2 + 2 * s] += 0.05 * gauss(rng);
      }
      double u = 0.5 + 0.5 * std::tanh(gauss(rng));
      start[0] = bounds.lo + margin + u * (bounds.hi - bounds.lo - 2.0 * margin);
    }
    SimplexResult r = nelder_mead(objective, start, opts);
    any_converged = any_converged || r.converged;
    if (r.fmin < best.fmin) best = r;
  }
  if (!any_converged)
    throw NonConvergence("gev fit: simplex search exhausted its budget");

  GevParams out{best.x[1], std::exp(best.x[2]), std::clamp(best.x[0], bounds.lo, bounds.hi)};
  return out;
}
}  // namespace

double gev_cdf(double u, const GevParams& params) {
  double y = (u - params.mu) / params.sigma;
  if (std::abs(params.xi) < kXiZero) return std::exp(-std::exp(-y));
  double t = 1.0 + params.xi * y;
  if (t <= 0.0) return params.xi > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::pow(t, -1.0 / params.xi));
}

double gev_quantile(double p, const GevParams& params) {
  if (!(p > 0.0) || !(p < 1.0)) throw OutOfRange("gev_quantile: p must be in (0, 1)");
  double s = -std::log(p);
  if (std::abs(params.xi) < kXiZero) return params.mu - params.sigma * std::log(s);
  return params.mu + params.sigma * (std::pow(s, -params.xi) - 1.0) / params.xi;
}

double gev_loglik(const Vector& series, const GevParams& params) {
  if (!(params.sigma > 0.0)) return -kInf;
  const int p = static_cast<int>(series.size());
  double ll = -p * std::log(params.sigma);
  if (std::abs(params.xi) < kXiZero) {
    for (int k = 0; k < p; ++k) {
      double y = (series[k] - params.mu) / params.sigma;
      ll += -y - std::exp(-y);
    }
    return ll;
  }
  for (int k = 0; k < p; ++k) {
    double t = 1.0 + params.xi * (series[k] - params.mu) / params.sigma;
    if (t <= 0.0) return -kInf;
    ll += -(1.0 + 1.0 / params.xi) * std::log(t) - std::pow(t, -1.0 / params.xi);
  }
  return ll;
}

GevParams fit_gev_ml(const Vector& series, XiBounds bounds) {
  return fit_pooled_core({series}, bounds);
}

GevParams fit_gev_pooled(int target, const std::vector<int>& neighbors,
                         const MaximaMatrix& data, XiBounds bounds) {
  std::vector<Vector> cols;
  cols.push_back(data.values.col(target));
  for (int j : neighbors) {
    if (j == target) throw OutOfRange("fit_gev_pooled: neighbor equals target");
    cols.push_back(data.values.col(j));
  }
  return fit_pooled_core(cols, bounds);
}

std::vector<int> nearest_neighbors(const StationSet& stations, int target, int J) {
  const int n = stations.size();
  std::vector<int> idx;
  idx.reserve(n - 1);
  for (int i = 0; i < n; ++i)
    if (i != target) idx.push_back(i);
  auto dist2 = [&](int i) {
    double de = stations.coords(i, 0) - stations.coords(target, 0);
    double dn = stations.coords(i, 1) - stations.coords(target, 1);
    return de * de + dn * dn;
  };
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return dist2(a) < dist2(b); });
  idx.resize(std::min<size_t>(idx.size(), static_cast<size_t>(J)));
  return idx;
}

double qq_discrepancy(const Vector& series, const GevParams& params) {
  const int p = static_cast<int>(series.size());
  std::vector<double> x(series.data(), series.data() + p);
  std::sort(x.begin(), x.end());
  double s = 0.0;
  for (int k = 1; k <= p; ++k)
    s += std::abs(x[k - 1] - gev_quantile(k / (p + 1.0), params));
  return s / p;
}

MarginFit fit_station_margin(int target, const MaximaMatrix& data, const StationSet& stations,
                             XiBounds bounds, const std::vector<int>& j_candidates) {
  MarginFit best;
  double best_score = kInf;
  for (int j : j_candidates) {
    int j_eff = std::min(j, stations.size() - 1);
    auto nb = nearest_neighbors(stations, target, j_eff);
    GevParams prm = fit_gev_pooled(target, nb, data, bounds);
    double score = qq_discrepancy(data.values.col(target), prm);
    if (score < best_score) {
      best_score = score;
      best.params = prm;
      best.neighbor_count = j_eff;
    }
  }
  return best;
}

std::vector<MarginFit> fit_margins(const MaximaMatrix& data, const StationSet& stations,
                                   XiBounds bounds) {
  std::vector<MarginFit> fits;
  fits.reserve(data.n_stations());
  for (int i = 0; i < data.n_stations(); ++i)
    fits.push_back(fit_station_margin(i, data, stations, bounds));
  return fits;
}

FrechetMatrix to_frechet(const MaximaMatrix& data, const std::vector<GevParams>& params) {
  if (static_cast<int>(params.size()) != data.n_stations())
    throw DimensionMismatch("to_frechet: one GevParams per station required");
  FrechetMatrix out;
  out.station_ids = data.station_ids;
  out.values.resize(data.n_years(), data.n_stations());
  for (int i = 0; i < data.n_stations(); ++i)
    for (int k = 0; k < data.n_years(); ++k) {
      double f = std::clamp(gev_cdf(data.values(k, i), params[i]), 1e-12, 1.0 - 1e-12);
      out.values(k, i) = -1.0 / std::log(f);
    }
  return out;
}

}  // namespace latmax
