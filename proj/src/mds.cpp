#include "latmax/mds.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "latmax/errors.hpp"

namespace latmax {

namespace {
void check_dissimilarity(const Matrix& D) {
  if (D.rows() != D.cols()) throw DimensionMismatch("dissimilarity matrix not square");
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    for (Eigen::Index j = 0; j < D.cols(); ++j) {
      if (D(i, j) < 0.0) throw OutOfRange("dissimilarity matrix has negative entry");
      if (D(i, j) != D(j, i)) throw DimensionMismatch("dissimilarity matrix not symmetric");
    }
}

void check_positive_offdiag(const Matrix& D) {
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    for (Eigen::Index j = 0; j < D.cols(); ++j)
      if (i != j && D(i, j) == 0.0)
        throw ZeroDissimilarity("off-diagonal dissimilarity is zero");
}
}  // namespace

Matrix Embedding::distance_matrix() const {
  const int n = size();
  Matrix D = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = distance(i, j);
      D(i, j) = d;
      D(j, i) = d;
    }
  return D;
}

Embedding classical_scaling(const Matrix& D, int d) {
  check_dissimilarity(D);
  const int n = static_cast<int>(D.rows());
  if (d < 1 || d > n - 1) throw DimensionError("classical_scaling: need 1 <= d <= n-1");

  Matrix D2 = D.array().square();
  Matrix J = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  Matrix B = -0.5 * J * D2 * J;
  B = 0.5 * (B + B.transpose());  // symmetrize roundoff

  Eigen::SelfAdjointEigenSolver<Matrix> eig(B);
  // Eigen sorts ascending; take the top-d from the back, clamping negatives.
  Embedding X;
  X.coords.resize(n, d);
  for (int c = 0; c < d; ++c) {
    double lambda = std::max(0.0, eig.eigenvalues()(n - 1 - c));
    X.coords.col(c) = eig.eigenvectors().col(n - 1 - c) * std::sqrt(lambda);
  }
  return X;
}

double raw_stress(const Embedding& X, const Matrix& D, const Matrix* weights) {
  const int n = X.size();
  if (D.rows() != n || D.cols() != n) throw DimensionMismatch("raw_stress: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double r = X.distance(i, j) - D(i, j);
      double w = weights ? (*weights)(i, j) : 1.0;
      s += w * r * r;
    }
  return s;
}

double sammon_stress(const Embedding& X, const Matrix& D) {
  const int n = X.size();
  if (D.rows() != n || D.cols() != n)
    throw DimensionMismatch("sammon_stress: dimension mismatch");
  check_positive_offdiag(D);
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double r = X.distance(i, j) - D(i, j);
      s += r * r / D(i, j);
    }
  return s;
}

Matrix sammon_gradient(const Embedding& X, const Matrix& D) {
  const int n = X.size();
  const int d = X.dim();
  check_positive_offdiag(D);
  Matrix G = Matrix::Zero(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double dij = X.distance(i, j);
      if (dij == 0.0) throw NonFiniteGradient("sammon_gradient: coincident points");
      double c = 2.0 * (dij - D(i, j)) / (D(i, j) * dij);
      G.row(i) += c * (X.coords.row(i) - X.coords.row(j));
    }
  return G;
}

Embedding sammon_mds(const Matrix& D, int d, const SammonOptions& opts) {
  check_dissimilarity(D);
  check_positive_offdiag(D);
  Embedding X = classical_scaling(D, d);
  const int n = X.size();

  // Separate coincident starting points before the first gradient.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (X.distance(i, j) == 0.0) X.coords(i, 0) += 1e-9 * (i + 1);

  double stress = sammon_stress(X, D);
  Matrix G(n, d), H(n, d);
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (stress == 0.0) break;
    G.setZero();
    H.setZero();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        double dij = X.distance(i, j);
        if (dij == 0.0) {
          X.coords(i, 0) += 1e-9;
          dij = X.distance(i, j);
        }
        double Dij = D(i, j);
        double g = 2.0 * (dij - Dij) / (Dij * dij);
        for (int q = 0; q < d; ++q) {
          double u = X.coords(i, q) - X.coords(j, q);
          G(i, q) += g * u;
          H(i, q) += 2.0 * u * u / (dij * dij * dij) + g;
        }
      }

    // Diagonal-Newton step with backtracking halving.
    double step = opts.step_factor;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      Embedding trial = X;
      for (int i = 0; i < n; ++i)
        for (int q = 0; q < d; ++q) {
          double h = std::abs(H(i, q));
          if (h < 1e-12) h = 1e-12;
          trial.coords(i, q) -= step * G(i, q) / h;
        }
      double trial_stress = sammon_stress(trial, D);
      if (trial_stress < stress) {
        double improvement = (stress - trial_stress) / stress;
        X = trial;
        stress = trial_stress;
        accepted = true;
        if (improvement < opts.rel_tolerance) return X;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent direction left at this scale
  }
  return X;
}

}  // namespace latmax
