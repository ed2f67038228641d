#include "latmax/maps.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "latmax/brown_resnick.hpp"
#include "latmax/errors.hpp"
#include "latmax/kriging.hpp"

namespace latmax {

double ElevationField::at(double easting, double northing) const {
  if (!raster) return constant;
  double best = constant, best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < raster->rows(); ++r) {
    double de = (*raster)(r, 0) - easting;
    double dn = (*raster)(r, 1) - northing;
    double d2 = de * de + dn * dn;
    if (d2 < best_d) {
      best_d = d2;
      best = (*raster)(r, 2);
    }
  }
  return best;
}

MapBBox station_bbox(const StationSet& stations, double margin_km) {
  MapBBox b;
  b.e_min = stations.coords.col(0).minCoeff() - margin_km;
  b.e_max = stations.coords.col(0).maxCoeff() + margin_km;
  b.n_min = stations.coords.col(1).minCoeff() - margin_km;
  b.n_max = stations.coords.col(1).maxCoeff() + margin_km;
  return b;
}

namespace {
template <typename ThetaAt>
std::vector<ThetaMapPoint> grid_map(double resolution_km, const MapBBox& bbox,
                                    const ElevationField& elevation, ThetaAt&& theta_at) {
  if (!(resolution_km > 0.0)) throw OutOfRange("theta map: resolution must be positive");
  if (!(bbox.e_max >= bbox.e_min) || !(bbox.n_max >= bbox.n_min) ||
      !std::isfinite(bbox.e_min) || !std::isfinite(bbox.e_max) ||
      !std::isfinite(bbox.n_min) || !std::isfinite(bbox.n_max))
    throw OutOfRange("theta map: invalid bounding box");
  std::vector<ThetaMapPoint> points;
  for (double northing = bbox.n_min; northing <= bbox.n_max + 1e-9; northing += resolution_km)
    for (double easting = bbox.e_min; easting <= bbox.e_max + 1e-9; easting += resolution_km) {
      ThetaMapPoint pt;
      pt.easting = easting;
      pt.northing = northing;
      pt.elevation = elevation.at(easting, northing);
      Vector loc(3);
      loc << easting, northing, pt.elevation;
      pt.theta = theta_at(loc);
      points.push_back(pt);
    }
  return points;
}
}  // namespace

std::vector<ThetaMapPoint> model_theta_map(const FittedModel& model, const Vector& reference,
                                           double resolution_km, const MapBBox& bbox,
                                           const ElevationField& elevation) {
  if (model.method == FitMethod::Classical) {
    return grid_map(resolution_km, bbox, elevation, [&](const Vector& loc) {
      double h = model.climate.distance(reference, loc);
      return static_cast<double>(
          extremal_coefficient(model.sigma, cov_value(model.cov, h)));
    });
  }
  Vector ref_latent = warp(model.warp, reference);
  return grid_map(resolution_km, bbox, elevation, [&](const Vector& loc) {
    double h = (warp(model.warp, loc) - ref_latent).norm();
    return static_cast<double>(extremal_coefficient(model.sigma, cov_value(model.cov, h)));
  });
}

std::vector<ThetaMapPoint> model_theta_map(const FittedModel& model, const StationSet& stations,
                                           const std::string& reference_id, double resolution_km,
                                           const MapBBox& bbox, const ElevationField& elevation) {
  int idx = stations.index_of(reference_id);
  return model_theta_map(model, stations.coords.row(idx).transpose(), resolution_km, bbox,
                         elevation);
}

std::vector<ThetaMapPoint> observed_theta_map(const ExtremalMatrix& theta_hat,
                                              const StationSet& stations,
                                              const std::string& reference_id,
                                              double resolution_km, const MapBBox& bbox,
                                              const ElevationField& elevation) {
  int ref = stations.index_of(reference_id);
  if (theta_hat.size() != stations.size())
    throw DimensionMismatch("observed_theta_map: theta/station size mismatch");
  KrigingModel krig = fit_kriging(stations.coords, theta_hat.theta_hat.col(ref));
  return grid_map(resolution_km, bbox, elevation, [&](const Vector& loc) {
    return std::clamp(krig.predict(loc), 1.0, 2.0);
  });
}

void write_theta_map_csv(const std::string& path, const std::vector<ThetaMapPoint>& points) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << "easting,northing,elevation,theta\n";
  out.precision(17);
  for (const auto& pt : points)
    out << pt.easting << ',' << pt.northing << ',' << pt.elevation << ',' << pt.theta << '\n';
}

}  // namespace latmax
