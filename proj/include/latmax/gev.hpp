#ifndef LATMAX_GEV_HPP
#define LATMAX_GEV_HPP

#include <vector>

#include "latmax/types.hpp"

namespace latmax {

struct GevParams {
  double mu = 0.0;        // location
  double sigma = 1.0;     // scale, > 0
  double xi = 0.0;        // shape
};

struct XiBounds {
  double lo = 0.0;
  double hi = 0.15;
};

// GEV CDF with the (.)_+ truncation; Gumbel limit for |xi| < 1e-9.
double gev_cdf(double u, const GevParams& params);

// Inverse CDF on (0, 1); used by the simulator and qq scoring.
double gev_quantile(double p, const GevParams& params);

// Log-likelihood of an i.i.d. sample (-inf outside the support).
double gev_loglik(const Vector& series, const GevParams& params);

// Box-constrained maximum-likelihood fit: simplex search with 5 restarts
// from perturbed probability-weighted-moment initializers.
GevParams fit_gev_ml(const Vector& series, XiBounds bounds = {});

// Pooled fit over the target station and its neighbors: shared xi,
// per-station (mu, sigma), independent likelihood. Returns the target's
// parameters. With no neighbors this is exactly fit_gev_ml.
GevParams fit_gev_pooled(int target, const std::vector<int>& neighbors,
                         const MaximaMatrix& data, XiBounds bounds = {});

// Indices of the J nearest stations to target, Euclidean in (easting, northing).
std::vector<int> nearest_neighbors(const StationSet& stations, int target, int J);

// Mean absolute deviation between empirical and fitted quantiles at
// plotting positions k/(p+1); the neighborhood-selection score.
double qq_discrepancy(const Vector& series, const GevParams& params);

struct MarginFit {
  GevParams params;
  int neighbor_count = 0;
};

// Fit one station choosing the neighborhood size over candidate J values
// by minimizing qq_discrepancy.
MarginFit fit_station_margin(int target, const MaximaMatrix& data, const StationSet& stations,
                             XiBounds bounds = {},
                             const std::vector<int>& j_candidates = {0, 3, 5, 10});

std::vector<MarginFit> fit_margins(const MaximaMatrix& data, const StationSet& stations,
                                   XiBounds bounds = {});

// u -> -1/log(F_x(u)) columnwise; F clamped into [1e-12, 1 - 1e-12] first.
FrechetMatrix to_frechet(const MaximaMatrix& data, const std::vector<GevParams>& params);

}  // namespace latmax

#endif
