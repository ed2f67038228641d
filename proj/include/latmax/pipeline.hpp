#ifndef LATMAX_PIPELINE_HPP
#define LATMAX_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "latmax/covariance.hpp"
#include "latmax/ideal_cov.hpp"
#include "latmax/kriging.hpp"
#include "latmax/madogram.hpp"
#include "latmax/mds.hpp"
#include "latmax/types.hpp"

namespace latmax {

// Rotation + anisotropy transform of (easting, northing, elevation); the
// climate-space baseline.
struct ClimateTransform {
  double beta = 0.0;
  double c1 = 1.0, c2 = 1.0, c3 = 1.0;

  Eigen::Matrix3d matrix() const;
  double distance(const Vector& a, const Vector& b) const;
  Matrix distance_matrix(const StationSet& stations) const;
};

struct ModelScores {
  double loglik = 0.0;
  double theta_mse = 0.0;
};

enum class FitMethod { Classical = 0, Mds1 = 1, Mds2 = 2 };

struct FittedModel {
  FitMethod method = FitMethod::Mds1;
  double sigma = 0.0;
  CovFunction cov;
  int d = 0;
  Embedding embedding;     // MDS methods
  WarpModel warp;          // MDS methods
  ClimateTransform climate;  // classical
  ModelScores scores;
  std::map<double, double> alpha_by_sigma;  // best alpha found per sigma (this d)
};

struct GridSpec {
  std::vector<double> sigma_grid;
  std::vector<double> alpha_grid;
  std::vector<int> d_set;
  double r1 = 0.05;
  double r2 = 0.00025;
  double epsilon = kDefaultEpsilon;

  static GridSpec defaults();
};

// Correlations implied by latent coordinates, capped just below 1 so the
// pairwise density stays non-degenerate for coincident embedded points.
Matrix latent_correlation(const Matrix& latent_coords, const CovFunction& f);

// Modeled extremal coefficients from latent coordinates.
Matrix latent_theta_matrix(const Matrix& latent_coords, const CovFunction& f, double sigma);

// Modeled extremal coefficients of the classical model.
Matrix climate_theta_matrix(const StationSet& stations, const ClimateTransform& t,
                            const CovFunction& f, double sigma);

// One evaluated grid point of the sweep; the raw material of the
// sigma-profile diagnostics. Only the fitting criterion of the method in
// play is evaluated (theta_mse for method 1, loglik for method 2); the
// other field is NaN.
struct LedgerRow {
  FitMethod method = FitMethod::Mds1;
  int d = 0;
  double sigma = 0.0;
  double alpha = 0.0;
  double loglik = 0.0;
  double theta_mse = 0.0;
};

// Grid search over (sigma, alpha) at fixed latent dimension d: build the
// ideal covariance, invert to distances, embed with Sammon MDS, score by
// theta-MSE (method 1) or pairwise log-likelihood (method 2). Method-2
// ideal covariances can be cached per sigma in cache_dir. When ledger is
// given, every grid point's scores are appended to it.
FittedModel fit_mds_model(FitMethod method, const FrechetMatrix& data,
                          const ExtremalMatrix& theta_hat, const GridSpec& grid, int d,
                          const StationSet& stations, const std::string& cache_dir = "",
                          std::vector<LedgerRow>* ledger = nullptr);

// Largest d accepted by the minimal-rate-of-improvement rule.
int select_dimension(const std::map<int, FittedModel>& per_d_models, const GridSpec& grid,
                     FitMethod method);

struct ClassicalFitOptions {
  int max_cycles = 100;
  double rel_tolerance = 1e-6;
  int line_search_iters = 32;
};

// Cyclic line-search maximization of the pairwise likelihood over
// (sigma, beta, c1, c2, c3, alpha) in climate space.
FittedModel fit_classical(const FrechetMatrix& data, const StationSet& stations,
                          const ExtremalMatrix& theta_hat,
                          const ClassicalFitOptions& opts = {});

// Greedy max-min (farthest point) subset of n2 stations in (easting, northing);
// the first point is drawn uniformly from the given RNG seed.
std::vector<int> space_filling_subset(const StationSet& stations, int n2, std::uint64_t seed);

struct HoldoutResult {
  int n2 = 0;
  std::vector<int> test_indices;
  FittedModel training_model;        // fitted on training stations only
  ModelScores all_station_scores;    // evaluated over all stations
  double train_pair_misfit = 0.0;    // mean squared theta misfit, train-train pairs
  double test_pair_misfit = 0.0;     // same over test-test pairs
};

// Refit on a training subset, warp the held-out stations into the latent
// space, and score over all stations. The (sigma -> alpha) mapping of the
// full-data model is reused instead of re-optimizing alpha.
HoldoutResult holdout_experiment(FitMethod method, const FrechetMatrix& data,
                                 const StationSet& stations, const GridSpec& grid, int d,
                                 const std::map<double, double>& alpha_by_sigma,
                                 int n2_min, int n2_max, std::uint64_t seed);

}  // namespace latmax

#endif
