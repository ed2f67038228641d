#ifndef LATMAX_SIMULATOR_HPP
#define LATMAX_SIMULATOR_HPP

#include <cstdint>

#include "latmax/covariance.hpp"
#include "latmax/types.hpp"

namespace latmax {

// Specification of a synthetic geometric-Gaussian max-stable field. The
// covariance acts on the supplied coordinates, which may live in physical
// or latent space.
struct SimSpec {
  Matrix coords;              // n x q points at which the field is sampled
  double sigma = 1.0;         // Brown-Resnick parameter
  CovFunction cov;            // correlation of the underlying Gaussian process
  int replicates = 1;         // p independent block-maxima replicates
  int truncation = 10000;     // hard cap on spectral atoms per replicate
  std::uint64_t seed = 0;
  double w_max = 6.0;         // practical bound on the Gaussian values
};

// Correlation matrix of the Gaussian process at the spec's points.
Matrix gaussian_correlation(const SimSpec& spec);

// Truncated spectral construction: Poisson atoms eta_1 > eta_2 > ... paired
// with independent Gaussian draws, pointwise maxima of eta * exp(sigma W -
// sigma^2/2). Marginals approximately unit Frechet.
FrechetMatrix simulate_field(const SimSpec& spec);

// Analytic pairwise extremal coefficients implied by the spec.
Matrix true_theta_matrix(const SimSpec& spec);

}  // namespace latmax

#endif
