#include "latmax/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "latmax/brown_resnick.hpp"
#include "latmax/csv.hpp"
#include "latmax/errors.hpp"
#include "latmax/optim.hpp"

namespace latmax {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Model correlations from realized latent distances are capped just below 1
// so coincident embedded points cannot push nu below its floor.
constexpr double kModelCovCap = 1.0 - 1e-9;
}  // namespace

GridSpec GridSpec::defaults() {
  GridSpec g;
  for (int i = 0; i <= 30; ++i) g.sigma_grid.push_back(1.0 + 0.1 * i);
  for (int i = 1; i <= 100; ++i) g.alpha_grid.push_back(0.02 * i);
  g.d_set = {2, 3, 4, 5, 6};
  return g;
}

Eigen::Matrix3d ClimateTransform::matrix() const {
  Eigen::Matrix3d U;
  U << c1 * std::cos(beta), -c1 * std::sin(beta), 0.0,
       c2 * std::sin(beta), c2 * std::cos(beta), 0.0,
       0.0, 0.0, c3;
  return U;
}

double ClimateTransform::distance(const Vector& a, const Vector& b) const {
  Eigen::Matrix3d U = matrix();
  return (U * (a.head<3>() - b.head<3>())).norm();
}

Matrix ClimateTransform::distance_matrix(const StationSet& stations) const {
  const int n = stations.size();
  Eigen::Matrix3d U = matrix();
  Matrix transformed = (U * stations.coords.transpose()).transpose();
  Matrix D = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = (transformed.row(i) - transformed.row(j)).norm();
      D(i, j) = d;
      D(j, i) = d;
    }
  return D;
}

Matrix latent_correlation(const Matrix& latent_coords, const CovFunction& f) {
  const auto n = latent_coords.rows();
  Matrix K = Matrix::Ones(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double h = (latent_coords.row(i) - latent_coords.row(j)).norm();
      double k = std::min(cov_value(f, h), kModelCovCap);
      K(i, j) = k;
      K(j, i) = k;
    }
  return K;
}

Matrix latent_theta_matrix(const Matrix& latent_coords, const CovFunction& f, double sigma) {
  const auto n = latent_coords.rows();
  Matrix theta = Matrix::Ones(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double h = (latent_coords.row(i) - latent_coords.row(j)).norm();
      theta(i, j) = extremal_coefficient(sigma, cov_value(f, h));
      theta(j, i) = theta(i, j);
    }
  return theta;
}

Matrix climate_theta_matrix(const StationSet& stations, const ClimateTransform& t,
                            const CovFunction& f, double sigma) {
  Matrix D = t.distance_matrix(stations);
  const auto n = D.rows();
  Matrix theta = Matrix::Ones(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      theta(i, j) = extremal_coefficient(sigma, cov_value(f, D(i, j)));
      theta(j, i) = theta(i, j);
    }
  return theta;
}

namespace {
std::string cache_filename(const std::string& dir, double sigma) {
  std::ostringstream name;
  name << "K2_sigma";
  name.setf(std::ios::fixed);
  name.precision(1);
  name << sigma << ".csv";
  return (std::filesystem::path(dir) / name.str()).string();
}

IdealCovMatrix ideal_cov_for(FitMethod method, const FrechetMatrix& data,
                             const ExtremalMatrix& theta_hat, double sigma, double epsilon,
                             const std::string& cache_dir) {
  if (method == FitMethod::Mds1) return ideal_cov_method1(theta_hat, sigma, epsilon);

  if (!cache_dir.empty()) {
    std::string path = cache_filename(cache_dir, sigma);
    if (file_exists(path)) {
      auto [ids, K] = read_square_matrix_csv(path);
      if (ids == data.station_ids) {
        IdealCovMatrix out;
        out.K = K;
        out.method = 2;
        out.sigma = sigma;
        out.epsilon = epsilon;
        return out;
      }
    }
    IdealCovMatrix out = ideal_cov_method2(data, sigma, epsilon);
    std::filesystem::create_directories(cache_dir);
    write_square_matrix_csv(path, data.station_ids, out.K);
    return out;
  }
  return ideal_cov_method2(data, sigma, epsilon);
}

// Lower is better for both methods.
double score_embedding(FitMethod method, const Embedding& emb, const FrechetMatrix& data,
                       const ExtremalMatrix& theta_hat, const CovFunction& f, double sigma) {
  if (method == FitMethod::Mds1)
    return theta_mse(latent_theta_matrix(emb.coords, f, sigma), theta_hat);
  return -pairwise_loglik(data, latent_correlation(emb.coords, f), sigma);
}
}  // namespace

FittedModel fit_mds_model(FitMethod method, const FrechetMatrix& data,
                          const ExtremalMatrix& theta_hat, const GridSpec& grid, int d,
                          const StationSet& stations, const std::string& cache_dir,
                          std::vector<LedgerRow>* ledger) {
  if (method != FitMethod::Mds1 && method != FitMethod::Mds2)
    throw OutOfRange("fit_mds_model: method must be 1 or 2");
  if (grid.sigma_grid.empty() || grid.alpha_grid.empty())
    throw EmptyGrid("fit_mds_model: empty parameter grid");

  FittedModel best;
  best.method = method;
  best.d = d;
  double best_score = kInf;

  for (double sigma : grid.sigma_grid) {
    IdealCovMatrix K = ideal_cov_for(method, data, theta_hat, sigma, grid.epsilon, cache_dir);
    // Power-exponential inversion: D*_alpha = (-log K)^(1/alpha) elementwise,
    // so the log is shared across the alpha grid.
    Matrix base = (-K.K.array().log()).matrix();
    base.diagonal().setZero();

    double sigma_best_alpha = grid.alpha_grid.front();
    double sigma_best_score = kInf;
    for (double alpha : grid.alpha_grid) {
      Matrix D = base.array().pow(1.0 / alpha).matrix();
      Embedding emb = sammon_mds(D, d);
      CovFunction f = CovFunction::power_exponential(alpha);
      double score = score_embedding(method, emb, data, theta_hat, f, sigma);
      if (ledger) {
        LedgerRow row;
        row.method = method;
        row.d = d;
        row.sigma = sigma;
        row.alpha = alpha;
        double nan = std::numeric_limits<double>::quiet_NaN();
        row.loglik = method == FitMethod::Mds2 ? -score : nan;
        row.theta_mse = method == FitMethod::Mds1 ? score : nan;
        ledger->push_back(row);
      }
      if (score < sigma_best_score) {
        sigma_best_score = score;
        sigma_best_alpha = alpha;
      }
      if (score < best_score) {
        best_score = score;
        best.sigma = sigma;
        best.cov = f;
        best.embedding = emb;
      }
    }
    best.alpha_by_sigma[sigma] = sigma_best_alpha;
  }

  best.warp = fit_warp(stations, best.embedding);
  best.scores.loglik =
      pairwise_loglik(data, latent_correlation(best.embedding.coords, best.cov), best.sigma);
  best.scores.theta_mse =
      theta_mse(latent_theta_matrix(best.embedding.coords, best.cov, best.sigma), theta_hat);
  return best;
}

int select_dimension(const std::map<int, FittedModel>& per_d_models, const GridSpec& grid,
                     FitMethod method) {
  std::vector<int> dims = grid.d_set;
  std::sort(dims.begin(), dims.end());
  if (dims.empty()) throw EmptyGrid("select_dimension: empty d set");
  for (int d : dims)
    if (!per_d_models.count(d))
      throw MissingDimension("select_dimension: no model for d=" + std::to_string(d));

  int chosen = dims.front();
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    const auto& cur = per_d_models.at(dims[i]).scores;
    const auto& next = per_d_models.at(dims[i + 1]).scores;
    bool accept = false;
    if (method == FitMethod::Mds1) {
      if (cur.theta_mse > 0.0)
        accept = 1.0 - next.theta_mse / cur.theta_mse > grid.r1;
    } else {
      double denom = std::max(std::abs(cur.loglik), 1e-12);
      accept = (next.loglik - cur.loglik) / denom > grid.r2;
    }
    if (!accept) break;
    chosen = dims[i + 1];
  }
  return chosen;
}

FittedModel fit_classical(const FrechetMatrix& data, const StationSet& stations,
                          const ExtremalMatrix& theta_hat, const ClassicalFitOptions& opts) {
  const int n = stations.size();
  if (data.n_stations() != n)
    throw DimensionMismatch("fit_classical: data/station mismatch");

  // Parameter vector: sigma, beta, log c1, log c2, log c3, alpha.
  const double half_pi = 1.5707963267948966;
  const double log_c_lo = std::log(1e-6), log_c_hi = std::log(1e2);
  std::vector<std::pair<double, double>> bounds = {
      {0.5, 6.0}, {-half_pi, half_pi}, {log_c_lo, log_c_hi},
      {log_c_lo, log_c_hi}, {log_c_lo, log_c_hi}, {0.02, 2.0}};

  auto loglik_at = [&](const std::vector<double>& p) {
    ClimateTransform t{p[1], std::exp(p[2]), std::exp(p[3]), std::exp(p[4])};
    Matrix D = t.distance_matrix(stations);
    CovFunction f = CovFunction::power_exponential(p[5]);
    Matrix K(n, n);
    for (int i = 0; i < n; ++i) {
      K(i, i) = 1.0;
      for (int j = i + 1; j < n; ++j) {
        double k = std::min(cov_value(f, D(i, j)), kModelCovCap);
        K(i, j) = k;
        K(j, i) = k;
      }
    }
    return pairwise_loglik(data, K, p[0]);
  };

  std::vector<double> p(6);
  p[0] = 2.0;
  p[1] = 0.0;
  for (int l = 0; l < 3; ++l) {
    double span = stations.coords.col(l).maxCoeff() - stations.coords.col(l).minCoeff();
    p[2 + l] = std::clamp(std::log(1.0 / std::max(span, 1e-6)), log_c_lo + 1e-9, log_c_hi - 1e-9);
  }
  p[5] = 1.0;

  double ll = loglik_at(p);
  bool converged = false;
  for (int cycle = 0; cycle < opts.max_cycles; ++cycle) {
    double ll_start = ll;
    for (int idx = 0; idx < 6; ++idx) {
      auto [lo, hi] = bounds[idx];
      auto neg = [&](double v) {
        std::vector<double> q = p;
        q[idx] = v;
        return -loglik_at(q);
      };
      double candidate = golden_section(neg, lo, hi, 1e-4 * (hi - lo), opts.line_search_iters);
      double cand_ll = -neg(candidate);
      if (cand_ll > ll) {  // line steps never decrease the likelihood
        p[idx] = candidate;
        ll = cand_ll;
      }
    }
    if (ll - ll_start <= opts.rel_tolerance * std::abs(ll)) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NonConvergence("fit_classical: line search did not converge within max cycles");

  FittedModel model;
  model.method = FitMethod::Classical;
  model.sigma = p[0];
  model.cov = CovFunction::power_exponential(p[5]);
  model.d = 3;
  model.climate = ClimateTransform{p[1], std::exp(p[2]), std::exp(p[3]), std::exp(p[4])};
  model.scores.loglik = ll;
  model.scores.theta_mse =
      theta_mse(climate_theta_matrix(stations, model.climate, model.cov, model.sigma), theta_hat);
  return model;
}

std::vector<int> space_filling_subset(const StationSet& stations, int n2, std::uint64_t seed) {
  const int n = stations.size();
  if (n2 < 1 || n2 > n) throw InsufficientStations("space_filling_subset: bad subset size");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> first(0, n - 1);

  std::vector<int> chosen{first(rng)};
  std::vector<double> min_dist(n, kInf);
  auto update = [&](int added) {
    for (int i = 0; i < n; ++i) {
      double de = stations.coords(i, 0) - stations.coords(added, 0);
      double dn = stations.coords(i, 1) - stations.coords(added, 1);
      min_dist[i] = std::min(min_dist[i], de * de + dn * dn);
    }
  };
  update(chosen[0]);
  while (static_cast<int>(chosen.size()) < n2) {
    int far = -1;
    double far_d = -1.0;
    for (int i = 0; i < n; ++i)
      if (min_dist[i] > far_d) {
        far_d = min_dist[i];
        far = i;
      }
    chosen.push_back(far);
    update(far);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

HoldoutResult holdout_experiment(FitMethod method, const FrechetMatrix& data,
                                 const StationSet& stations, const GridSpec& grid, int d,
                                 const std::map<double, double>& alpha_by_sigma,
                                 int n2_min, int n2_max, std::uint64_t seed) {
  const int n = stations.size();
  if (data.n_stations() != n)
    throw DimensionMismatch("holdout_experiment: data/station mismatch");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(n2_min, n2_max);
  int n2 = pick(rng);
  if (n - n2 < d + 2)
    throw InsufficientStations("holdout_experiment: too few training stations");

  std::vector<int> test = space_filling_subset(stations, n2, rng());
  std::vector<bool> is_test(n, false);
  for (int t : test) is_test[t] = true;
  std::vector<int> train;
  for (int i = 0; i < n; ++i)
    if (!is_test[i]) train.push_back(i);

  FrechetMatrix train_data;
  StationSet train_stations;
  train_data.values.resize(data.n_years(), static_cast<Eigen::Index>(train.size()));
  train_stations.coords.resize(static_cast<Eigen::Index>(train.size()), 3);
  for (size_t c = 0; c < train.size(); ++c) {
    train_data.values.col(static_cast<Eigen::Index>(c)) = data.values.col(train[c]);
    train_data.station_ids.push_back(data.station_ids[train[c]]);
    train_stations.ids.push_back(stations.ids[train[c]]);
    train_stations.coords.row(static_cast<Eigen::Index>(c)) = stations.coords.row(train[c]);
  }

  ExtremalMatrix theta_train = extremal_matrix(train_data);

  // Sigma-only sweep: alpha comes from the full-data (sigma -> alpha) map.
  double best_score = kInf;
  FittedModel best;
  best.method = method;
  best.d = d;
  for (double sigma : grid.sigma_grid) {
    auto it = alpha_by_sigma.find(sigma);
    if (it == alpha_by_sigma.end()) continue;
    CovFunction f = CovFunction::power_exponential(it->second);
    IdealCovMatrix K = ideal_cov_for(method, train_data, theta_train, sigma, grid.epsilon, "");
    Matrix D = matrix_inverse_map(f, K.K);
    Embedding emb = sammon_mds(D, d);
    double score = score_embedding(method, emb, train_data, theta_train, f, sigma);
    if (score < best_score) {
      best_score = score;
      best.sigma = sigma;
      best.cov = f;
      best.embedding = emb;
    }
  }
  if (!(best_score < kInf)) throw EmptyGrid("holdout_experiment: no sigma evaluated");

  best.warp = fit_warp(train_stations, best.embedding);
  best.scores.loglik = pairwise_loglik(
      train_data, latent_correlation(best.embedding.coords, best.cov), best.sigma);
  best.scores.theta_mse = theta_mse(
      latent_theta_matrix(best.embedding.coords, best.cov, best.sigma), theta_train);

  // Assemble all-station latent coordinates: MDS placement for the training
  // stations, kriged warp for the held-out ones.
  Matrix full_coords(n, d);
  for (size_t c = 0; c < train.size(); ++c)
    full_coords.row(train[c]) = best.embedding.coords.row(static_cast<Eigen::Index>(c));
  for (int t : test)
    full_coords.row(t) = warp(best.warp, stations.coords.row(t).transpose()).transpose();

  ExtremalMatrix theta_full = extremal_matrix(data);
  Matrix model_theta = latent_theta_matrix(full_coords, best.cov, best.sigma);

  HoldoutResult result;
  result.n2 = n2;
  result.test_indices = test;
  result.training_model = best;
  result.all_station_scores.loglik =
      pairwise_loglik(data, latent_correlation(full_coords, best.cov), best.sigma);
  result.all_station_scores.theta_mse = theta_mse(model_theta, theta_full);

  double train_sum = 0.0, test_sum = 0.0;
  int train_cnt = 0, test_cnt = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double e = model_theta(i, j) - theta_full.theta_hat(i, j);
      if (!is_test[i] && !is_test[j]) {
        train_sum += e * e;
        ++train_cnt;
      } else if (is_test[i] && is_test[j]) {
        test_sum += e * e;
        ++test_cnt;
      }
    }
  result.train_pair_misfit = train_cnt ? train_sum / train_cnt : 0.0;
  result.test_pair_misfit = test_cnt ? test_sum / test_cnt : 0.0;
  return result;
}

}  // namespace latmax
