#ifndef LATMAX_MDS_HPP
#define LATMAX_MDS_HPP

#include "latmax/types.hpp"

namespace latmax {

// n x d configuration of latent coordinates.
struct Embedding {
  Matrix coords;

  int size() const { return static_cast<int>(coords.rows()); }
  int dim() const { return static_cast<int>(coords.cols()); }
  double distance(int i, int j) const { return (coords.row(i) - coords.row(j)).norm(); }
  Matrix distance_matrix() const;
};

struct SammonOptions {
  int max_iterations = 500;
  double rel_tolerance = 1e-9;
  double step_factor = 0.3;
};

// Torgerson classical scaling: double-centered squared dissimilarities,
// eigendecomposition, negative eigenvalues clamped to zero.
Embedding classical_scaling(const Matrix& D, int d);

// Weighted raw stress, default weights 1.
double raw_stress(const Embedding& X, const Matrix& D, const Matrix* weights = nullptr);

// Raw stress with weights 1/D_ij; requires strictly positive off-diagonal D.
double sammon_stress(const Embedding& X, const Matrix& D);

// nd-dimensional gradient of sammon_stress with respect to the coordinates.
Matrix sammon_gradient(const Embedding& X, const Matrix& D);

// Diagonal-Newton descent on the Sammon stress, initialized by classical
// scaling. Stress never increases across accepted steps.
Embedding sammon_mds(const Matrix& D, int d, const SammonOptions& opts = {});

}  // namespace latmax

#endif
