// latmax: fit latent-space max-stable models to block-maxima data.
//
// Subcommands cover the full pipeline: margin fitting (fit-margins),
// extremal-coefficient estimation (estimate-theta), latent-space and
// climate-space dependence fitting (fit-mds, fit-classical), synthetic data
// generation (simulate), the station hold-out experiment (holdout) and
// extremal-coefficient map export (theta-map).
//
// Every option can come from a flat key=value config file (--config);
// explicit command-line flags win. Unknown config keys are errors.
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "latmax/brown_resnick.hpp"
#include "latmax/csv.hpp"
#include "latmax/errors.hpp"
#include "latmax/gev.hpp"
#include "latmax/ideal_cov.hpp"
#include "latmax/madogram.hpp"
#include "latmax/maps.hpp"
#include "latmax/pipeline.hpp"
#include "latmax/simulator.hpp"

namespace fs = std::filesystem;
using namespace latmax;

namespace {

// ---------------------------------------------------------------- config glue

// Applies config-file values to CLI11 options that were not given on the
// command line; any config key with no matching option is rejected.
void apply_config(CLI::App* cmd, const std::string& config_path) {
  if (config_path.empty()) return;
  auto cfg = read_config(config_path);
  for (const auto& [key, value] : cfg) {
    CLI::Option* opt = nullptr;
    for (CLI::Option* o : cmd->get_options()) {
      if (o->check_name("--" + key)) {
        opt = o;
        break;
      }
    }
    if (!opt) throw ParseError(config_path + ": unknown key '" + key + "'");
    if (opt->count() == 0) opt->add_result(value)->run_callback();
  }
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double a, step, b;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &step, &b) != 3 || step <= 0.0)
      throw ParseError("bad grid '" + text + "', expected start:step:stop");
    for (double v = a; v <= b + 1e-9; v += step) out.push_back(v);
  } else {
    std::string item;
    for (std::istringstream ss(text); std::getline(ss, item, ',');)
      out.push_back(std::stod(item));
  }
  if (out.empty()) throw ParseError("empty grid '" + text + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::string item;
  for (std::istringstream ss(text); std::getline(ss, item, ',');)
    out.push_back(std::stoi(item));
  if (out.empty()) throw ParseError("empty list '" + text + "'");
  return out;
}

CovFunction parse_cov(const std::string& text) {
  if (text == "m32") return CovFunction::matern32();
  if (text == "m52") return CovFunction::matern52();
  double alpha;
  if (std::sscanf(text.c_str(), "pe:%lf", &alpha) == 1)
    return CovFunction::power_exponential(alpha);
  throw ParseError("bad covariance '" + text + "', expected pe:<alpha>, m32 or m52");
}

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out))
    throw ParseError("cannot create output directory '" + out + "'");
}

void write_kv(const std::string& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream f(path);
  if (!f) throw ParseError(path + ": cannot open for writing");
  for (const auto& [k, v] : kv) f << k << "=" << v << "\n";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Loads the station/maxima-or-frechet pair with schema validation; station
// rows are reordered to the data's column order.
struct AlignedData {
  StationSet stations;
  FrechetMatrix frechet;
};

AlignedData load_frechet(const std::string& stations_path, const std::string& frechet_path) {
  AlignedData a;
  StationSet st = ingest_stations(stations_path);
  a.frechet = ingest_frechet(frechet_path);
  check_station_agreement(st, a.frechet.station_ids);
  a.stations = align_stations(st, a.frechet.station_ids);
  return a;
}

// ------------------------------------------------------------- model summary

void write_mds_model(const std::string& out, const FittedModel& m,
                     const std::vector<std::string>& ids) {
  std::vector<std::pair<std::string, std::string>> kv = {
      {"method", m.method == FitMethod::Mds1 ? "1" : "2"},
      {"d", std::to_string(m.d)},
      {"sigma", fmt(m.sigma)},
      {"alpha", fmt(m.cov.alpha)},
      {"loglik", fmt(m.scores.loglik)},
      {"theta_mse", fmt(m.scores.theta_mse)},
  };
  for (const auto& [sigma, alpha] : m.alpha_by_sigma)
    kv.emplace_back("alpha_at_" + fmt(sigma), fmt(alpha));
  write_kv((fs::path(out) / "model.txt").string(), kv);
  write_embedding_csv((fs::path(out) / "embedding.csv").string(), ids, m.embedding);
}

FittedModel read_mds_model(const std::string& model_path, const std::string& embedding_path,
                           const StationSet& stations) {
  auto kv = read_config(model_path);
  FittedModel m;
  m.method = kv.at("method") == "2" ? FitMethod::Mds2 : FitMethod::Mds1;
  m.d = std::stoi(kv.at("d"));
  m.sigma = std::stod(kv.at("sigma"));
  m.cov = CovFunction::power_exponential(std::stod(kv.at("alpha")));
  auto [ids, emb] = read_embedding_csv(embedding_path);
  check_station_agreement(stations, ids);
  m.embedding = emb;
  m.warp = fit_warp(align_stations(stations, ids), emb);
  return m;
}

void write_ledger(const std::string& path, const std::vector<LedgerRow>& rows) {
  std::ofstream f(path);
  if (!f) throw ParseError(path + ": cannot open for writing");
  f << "method,d,sigma,alpha,loglik,theta_mse\n";
  for (const auto& r : rows)
    f << (r.method == FitMethod::Mds1 ? 1 : 2) << ',' << r.d << ',' << fmt(r.sigma) << ','
      << fmt(r.alpha) << ',' << fmt(r.loglik) << ',' << fmt(r.theta_mse) << '\n';
}

// ----------------------------------------------------------------- commands

struct CommonGrid {
  std::string sigma_grid = "1.0:0.1:4.0";
  std::string alpha_grid;  // empty: 0.02 * {1..100}
  std::string d_set = "2,3,4,5,6";
  double epsilon = kDefaultEpsilon;
  double r1 = 0.05;
  double r2 = 0.00025;

  GridSpec to_spec() const {
    GridSpec g = GridSpec::defaults();
    g.sigma_grid = parse_grid(sigma_grid);
    if (!alpha_grid.empty()) g.alpha_grid = parse_grid(alpha_grid);
    g.d_set = parse_int_list(d_set);
    g.epsilon = epsilon;
    g.r1 = r1;
    g.r2 = r2;
    return g;
  }
};

int cmd_fit_margins(const std::string& stations_path, const std::string& maxima_path,
                    const std::string& out, double xi_lo, double xi_hi) {
  ensure_out_dir(out);
  StationSet st = ingest_stations(stations_path);
  MaximaMatrix data = ingest_maxima(maxima_path);
  check_station_agreement(st, data.station_ids);
  StationSet aligned = align_stations(st, data.station_ids);
  std::vector<MarginFit> fits = fit_margins(data, aligned, {xi_lo, xi_hi});
  write_gev_params_csv((fs::path(out) / "gev_params.csv").string(), data.station_ids, fits);
  std::vector<GevParams> params;
  for (const auto& f : fits) params.push_back(f.params);
  write_frechet_csv((fs::path(out) / "frechet.csv").string(), to_frechet(data, params));
  std::printf("fitted %d station margins -> %s\n", data.n_stations(), out.c_str());
  return 0;
}

int cmd_estimate_theta(const std::string& frechet_path, const std::string& out) {
  ensure_out_dir(out);
  FrechetMatrix z = ingest_frechet(frechet_path);
  ExtremalMatrix hat = extremal_matrix(z);
  write_square_matrix_csv((fs::path(out) / "theta_hat.csv").string(), hat.station_ids,
                          hat.theta_hat);
  std::printf("estimated %d x %d extremal coefficients -> %s\n", hat.size(), hat.size(),
              out.c_str());
  return 0;
}

int cmd_fit_mds(const std::string& stations_path, const std::string& frechet_path,
                const std::string& out, int method_id, const CommonGrid& gridspec,
                const std::string& cache_dir) {
  if (method_id != 1 && method_id != 2)
    throw ParseError("method must be 1 or 2, got " + std::to_string(method_id));
  ensure_out_dir(out);
  AlignedData a = load_frechet(stations_path, frechet_path);
  ExtremalMatrix hat = extremal_matrix(a.frechet);
  GridSpec grid = gridspec.to_spec();
  FitMethod method = method_id == 1 ? FitMethod::Mds1 : FitMethod::Mds2;

  std::vector<LedgerRow> ledger;
  std::map<int, FittedModel> per_d;
  for (int d : grid.d_set)
    per_d[d] = fit_mds_model(method, a.frechet, hat, grid, d, a.stations, cache_dir, &ledger);
  int d = select_dimension(per_d, grid, method);
  const FittedModel& best = per_d[d];

  write_mds_model(out, best, a.frechet.station_ids);
  write_ledger((fs::path(out) / "ledger.csv").string(), ledger);
  std::printf("method %d: d=%d sigma=%.3f alpha=%.3f loglik=%.6f theta_mse=%.8f -> %s\n",
              method_id, best.d, best.sigma, best.cov.alpha, best.scores.loglik,
              best.scores.theta_mse, out.c_str());
  return 0;
}

int cmd_fit_classical(const std::string& stations_path, const std::string& frechet_path,
                      const std::string& out, int max_cycles) {
  ensure_out_dir(out);
  AlignedData a = load_frechet(stations_path, frechet_path);
  ExtremalMatrix hat = extremal_matrix(a.frechet);
  ClassicalFitOptions opts;
  opts.max_cycles = max_cycles;
  FittedModel m = fit_classical(a.frechet, a.stations, hat, opts);
  write_kv((fs::path(out) / "model_classical.txt").string(),
           {{"method", "classical"},
            {"sigma", fmt(m.sigma)},
            {"alpha", fmt(m.cov.alpha)},
            {"beta", fmt(m.climate.beta)},
            {"c1", fmt(m.climate.c1)},
            {"c2", fmt(m.climate.c2)},
            {"c3", fmt(m.climate.c3)},
            {"loglik", fmt(m.scores.loglik)},
            {"theta_mse", fmt(m.scores.theta_mse)}});
  std::printf("classical: sigma=%.3f alpha=%.3f loglik=%.6f theta_mse=%.8f -> %s\n", m.sigma,
              m.cov.alpha, m.scores.loglik, m.scores.theta_mse, out.c_str());
  return 0;
}

int cmd_simulate(const std::string& stations_path, const std::string& embedding_path,
                 const std::string& out, double sigma, const std::string& cov_text,
                 int replicates, std::uint64_t seed, int truncation, double w_max) {
  ensure_out_dir(out);
  StationSet st = ingest_stations(stations_path);
  SimSpec spec;
  if (!embedding_path.empty()) {
    auto [ids, emb] = read_embedding_csv(embedding_path);
    check_station_agreement(st, ids);
    st = align_stations(st, ids);
    spec.coords = emb.coords;
  } else {
    spec.coords = st.coords.leftCols(2);
  }
  spec.sigma = sigma;
  spec.cov = parse_cov(cov_text);
  spec.replicates = replicates;
  spec.seed = seed;
  spec.truncation = truncation;
  spec.w_max = w_max;
  FrechetMatrix z = simulate_field(spec);
  z.station_ids = st.ids;
  write_frechet_csv((fs::path(out) / "frechet.csv").string(), z);
  write_square_matrix_csv((fs::path(out) / "theta_true.csv").string(), st.ids,
                          true_theta_matrix(spec));
  std::printf("simulated %d replicates at %d stations -> %s\n", replicates, st.size(),
              out.c_str());
  return 0;
}

int cmd_holdout(const std::string& stations_path, const std::string& frechet_path,
                const std::string& out, int method_id, const CommonGrid& gridspec, int d,
                int n2_min, int n2_max, std::uint64_t seed, const std::string& cache_dir) {
  if (method_id != 1 && method_id != 2)
    throw ParseError("method must be 1 or 2, got " + std::to_string(method_id));
  ensure_out_dir(out);
  AlignedData a = load_frechet(stations_path, frechet_path);
  ExtremalMatrix hat = extremal_matrix(a.frechet);
  GridSpec grid = gridspec.to_spec();
  FitMethod method = method_id == 1 ? FitMethod::Mds1 : FitMethod::Mds2;

  // Full-data fit first: it fixes the (sigma -> alpha) profile and, if d is
  // not forced, the latent dimension used in the hold-out refit.
  std::map<int, FittedModel> per_d;
  for (int dd : grid.d_set)
    per_d[dd] = fit_mds_model(method, a.frechet, hat, grid, dd, a.stations, cache_dir);
  int d_used = d > 0 ? d : select_dimension(per_d, grid, method);
  if (!per_d.count(d_used))
    throw MissingDimension("holdout: d=" + std::to_string(d_used) + " not in d_set");
  const FittedModel& full = per_d[d_used];

  HoldoutResult h = holdout_experiment(method, a.frechet, a.stations, grid, d_used,
                                       full.alpha_by_sigma, n2_min, n2_max, seed);
  std::string test_ids;
  for (int idx : h.test_indices) {
    if (!test_ids.empty()) test_ids += ";";
    test_ids += a.frechet.station_ids[idx];
  }
  write_kv((fs::path(out) / "holdout.txt").string(),
           {{"method", std::to_string(method_id)},
            {"d", std::to_string(d_used)},
            {"n2", std::to_string(h.n2)},
            {"test_stations", test_ids},
            {"train_sigma", fmt(h.training_model.sigma)},
            {"train_alpha", fmt(h.training_model.cov.alpha)},
            {"train_loglik", fmt(h.training_model.scores.loglik)},
            {"train_theta_mse", fmt(h.training_model.scores.theta_mse)},
            {"all_loglik", fmt(h.all_station_scores.loglik)},
            {"all_theta_mse", fmt(h.all_station_scores.theta_mse)},
            {"train_pair_misfit", fmt(h.train_pair_misfit)},
            {"test_pair_misfit", fmt(h.test_pair_misfit)}});
  std::printf("holdout: n2=%d train misfit=%.8f test misfit=%.8f -> %s\n", h.n2,
              h.train_pair_misfit, h.test_pair_misfit, out.c_str());
  return 0;
}

// `easting,northing,elevation` rows; the map-grid schema without theta.
Matrix read_elevation_raster(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line) || line != "easting,northing,elevation")
    throw SchemaMismatch(path + ": expected header easting,northing,elevation");
  std::vector<std::array<double, 3>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<double, 3> r;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r[0], &r[1], &r[2]) != 3)
      throw ParseError(path + ": bad raster row at line " + std::to_string(lineno));
    rows.push_back(r);
  }
  if (rows.empty()) throw ParseError(path + ": empty raster");
  Matrix out(static_cast<int>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<int>(i)) << rows[i][0], rows[i][1], rows[i][2];
  return out;
}

int cmd_theta_map(const std::string& kind, const std::string& stations_path,
                  const std::string& frechet_path, const std::string& model_path,
                  const std::string& embedding_path, const std::string& out,
                  const std::string& reference, double resolution, double margin,
                  double elevation_const, const std::string& elevation_raster) {
  ensure_out_dir(out);
  StationSet st = ingest_stations(stations_path);
  MapBBox bbox = station_bbox(st, margin);
  ElevationField elev;
  elev.constant = elevation_const;
  if (!elevation_raster.empty()) elev.raster = read_elevation_raster(elevation_raster);

  std::vector<ThetaMapPoint> pts;
  if (kind == "observed") {
    FrechetMatrix z = ingest_frechet(frechet_path);
    check_station_agreement(st, z.station_ids);
    pts = observed_theta_map(extremal_matrix(z), align_stations(st, z.station_ids), reference,
                             resolution, bbox, elev);
  } else if (kind == "classical") {
    auto kv = read_config(model_path);
    FittedModel m;
    m.method = FitMethod::Classical;
    m.sigma = std::stod(kv.at("sigma"));
    m.cov = CovFunction::power_exponential(std::stod(kv.at("alpha")));
    m.climate = ClimateTransform{std::stod(kv.at("beta")), std::stod(kv.at("c1")),
                                 std::stod(kv.at("c2")), std::stod(kv.at("c3"))};
    pts = model_theta_map(m, st, reference, resolution, bbox, elev);
  } else if (kind == "mds") {
    FittedModel m = read_mds_model(model_path, embedding_path, st);
    pts = model_theta_map(m, st, reference, resolution, bbox, elev);
  } else {
    throw ParseError("map kind must be observed, classical or mds, got '" + kind + "'");
  }
  write_theta_map_csv((fs::path(out) / "theta_map.csv").string(), pts);
  std::printf("wrote %zu map points -> %s\n", pts.size(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent-space max-stable model fitting for block maxima"};
  app.require_subcommand(1);

  std::string config, stations, maxima, frechet, out = ".", cache_dir, embedding, model_path;
  std::string cov_text = "pe:1.0", kind = "observed", reference, elevation_raster;
  CommonGrid grid;
  int method = 1, d = 0, replicates = 100, truncation = 10000, max_cycles = 100;
  int n2_min = 10, n2_max = 10;
  double xi_lo = 0.0, xi_hi = 0.15, sigma = 1.0, w_max = 6.0;
  double resolution = 5.0, margin = 10.0, elevation_const = 500.0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--config", config, "key=value config file; flags override");
    c->add_option("--out", out, "output directory");
  };
  auto add_grid = [&](CLI::App* c) {
    c->add_option("--method", method, "fitting method, 1 or 2");
    c->add_option("--sigma-grid", grid.sigma_grid, "sigma grid, start:step:stop or list");
    c->add_option("--alpha-grid", grid.alpha_grid, "alpha grid, start:step:stop or list");
    c->add_option("--d-set", grid.d_set, "candidate latent dimensions, comma list");
    c->add_option("--epsilon", grid.epsilon, "ideal-covariance floor");
    c->add_option("--r1", grid.r1, "dimension-selection rate, method 1");
    c->add_option("--r2", grid.r2, "dimension-selection rate, method 2");
    c->add_option("--cache-dir", cache_dir, "method-2 ideal-covariance cache directory");
  };

  CLI::App* c_margins = app.add_subcommand("fit-margins", "fit GEV margins, export Frechet data");
  c_margins->add_option("--stations", stations, "station CSV");
  c_margins->add_option("--maxima", maxima, "block-maxima CSV");
  c_margins->add_option("--xi-lo", xi_lo, "lower shape bound");
  c_margins->add_option("--xi-hi", xi_hi, "upper shape bound");
  add_common(c_margins);

  CLI::App* c_theta = app.add_subcommand("estimate-theta", "F-madogram extremal coefficients");
  c_theta->add_option("--frechet", frechet, "Frechet-scale data CSV");
  add_common(c_theta);

  CLI::App* c_mds = app.add_subcommand("fit-mds", "latent-space dependence fit");
  c_mds->add_option("--stations", stations, "station CSV");
  c_mds->add_option("--frechet", frechet, "Frechet-scale data CSV");
  add_grid(c_mds);
  add_common(c_mds);

  CLI::App* c_cls = app.add_subcommand("fit-classical", "climate-space baseline fit");
  c_cls->add_option("--stations", stations, "station CSV");
  c_cls->add_option("--frechet", frechet, "Frechet-scale data CSV");
  c_cls->add_option("--max-cycles", max_cycles, "line-search cycle budget");
  add_common(c_cls);

  CLI::App* c_sim = app.add_subcommand("simulate", "synthetic max-stable field");
  c_sim->add_option("--stations", stations, "station CSV");
  c_sim->add_option("--embedding", embedding, "optional latent coordinates CSV");
  c_sim->add_option("--sigma", sigma, "Brown-Resnick sigma");
  c_sim->add_option("--cov", cov_text, "covariance: pe:<alpha>, m32 or m52");
  c_sim->add_option("--replicates", replicates, "number of replicates");
  c_sim->add_option("--seed", seed, "RNG seed");
  c_sim->add_option("--truncation", truncation, "spectral atom cap");
  c_sim->add_option("--w-max", w_max, "practical Gaussian bound");
  add_common(c_sim);

  CLI::App* c_hold = app.add_subcommand("holdout", "station hold-out experiment");
  c_hold->add_option("--stations", stations, "station CSV");
  c_hold->add_option("--frechet", frechet, "Frechet-scale data CSV");
  c_hold->add_option("--d", d, "latent dimension (0 = select automatically)");
  c_hold->add_option("--n2-min", n2_min, "minimum held-out stations");
  c_hold->add_option("--n2-max", n2_max, "maximum held-out stations");
  c_hold->add_option("--seed", seed, "RNG seed");
  add_grid(c_hold);
  add_common(c_hold);

  CLI::App* c_map = app.add_subcommand("theta-map", "extremal-coefficient map export");
  c_map->add_option("--kind", kind, "observed, classical or mds");
  c_map->add_option("--stations", stations, "station CSV");
  c_map->add_option("--frechet", frechet, "Frechet-scale data CSV (observed maps)");
  c_map->add_option("--model", model_path, "model summary file (model maps)");
  c_map->add_option("--embedding", embedding, "embedding CSV (mds maps)");
  c_map->add_option("--reference", reference, "reference station id");
  c_map->add_option("--resolution", resolution, "grid resolution, km");
  c_map->add_option("--margin", margin, "bounding-box margin around stations, km");
  c_map->add_option("--elevation", elevation_const, "constant map elevation, m");
  c_map->add_option("--elevation-raster", elevation_raster, "elevation raster CSV");
  add_common(c_map);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    apply_config(cmd, config);
    if (cmd == c_margins) return cmd_fit_margins(stations, maxima, out, xi_lo, xi_hi);
    if (cmd == c_theta) return cmd_estimate_theta(frechet, out);
    if (cmd == c_mds) return cmd_fit_mds(stations, frechet, out, method, grid, cache_dir);
    if (cmd == c_cls) return cmd_fit_classical(stations, frechet, out, max_cycles);
    if (cmd == c_sim)
      return cmd_simulate(stations, embedding, out, sigma, cov_text, replicates, seed,
                          truncation, w_max);
    if (cmd == c_hold)
      return cmd_holdout(stations, frechet, out, method, grid, d, n2_min, n2_max, seed,
                         cache_dir);
    if (cmd == c_map)
      return cmd_theta_map(kind, stations, frechet, model_path, embedding, out, reference,
                           resolution, margin, elevation_const, elevation_raster);
    return 1;
  } catch (const NonConvergence& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const SingularCovariance& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const NonFiniteGradient& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const DegenerateDependence& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const DegenerateSample& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
