#ifndef LATMAX_KRIGING_HPP
#define LATMAX_KRIGING_HPP

#include "latmax/covariance.hpp"
#include "latmax/mds.hpp"
#include "latmax/types.hpp"

namespace latmax {

// Ordinary kriging with an anisotropic exponential covariance,
// exp(-sum_l |h_l| / range_l), range parameters fitted by maximum
// likelihood (profiled variance, fixed relative nugget).
struct KrigingModel {
  Matrix inputs;        // n x q
  Vector observations;
  Vector ranges;        // q
  double variance = 0.0;
  double nugget = 1e-8;  // relative to variance
  double mean = 0.0;
  Vector weights;        // C^{-1} (y - mean)
  bool constant = false;

  double predict(const Vector& x) const;
};

struct KrigingFitOptions {
  double nugget = 1e-8;
  double log_range_lo = -4.605170185988091;  // log(1e-2)
  double log_range_hi = 9.210340371976184;   // log(1e4)
  int starts = 5;
};

KrigingModel fit_kriging(const Matrix& inputs, const Vector& observations,
                         const KrigingFitOptions& opts = {});

// The spatial extension of an MDS embedding: one kriging predictor per
// latent coordinate over (easting, northing, elevation).
struct WarpModel {
  std::vector<KrigingModel> predictors;
  StationSet stations;
  Embedding embedding;

  int dim() const { return static_cast<int>(predictors.size()); }
};

WarpModel fit_warp(const StationSet& stations, const Embedding& emb,
                   const KrigingFitOptions& opts = {});

// psi(x): latent coordinates of an arbitrary physical location.
Vector warp(const WarpModel& model, const Vector& location);

// k(psi(a), psi(b)) under the latent-space covariance.
double model_cov(const WarpModel& model, const CovFunction& f,
                 const Vector& loc_a, const Vector& loc_b);

}  // namespace latmax

#endif
