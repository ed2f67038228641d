#ifndef LATMAX_MAPS_HPP
#define LATMAX_MAPS_HPP

#include <optional>
#include <string>
#include <vector>

#include "latmax/madogram.hpp"
#include "latmax/pipeline.hpp"
#include "latmax/types.hpp"

namespace latmax {

struct MapBBox {
  double e_min = 0.0, e_max = 0.0;
  double n_min = 0.0, n_max = 0.0;
};

struct ThetaMapPoint {
  double easting = 0.0;
  double northing = 0.0;
  double elevation = 0.0;
  double theta = 1.0;
};

// Elevation at map grid points: nearest point of an optional raster,
// otherwise a constant (default 500 m).
struct ElevationField {
  std::optional<Matrix> raster;  // rows of (easting, northing, elevation)
  double constant = 500.0;

  double at(double easting, double northing) const;
};

// Pairwise extremal coefficients between a reference location and a regular
// grid over the bounding box, under a fitted model.
std::vector<ThetaMapPoint> model_theta_map(const FittedModel& model, const Vector& reference,
                                           double resolution_km, const MapBBox& bbox,
                                           const ElevationField& elevation = {});
std::vector<ThetaMapPoint> model_theta_map(const FittedModel& model, const StationSet& stations,
                                           const std::string& reference_id, double resolution_km,
                                           const MapBBox& bbox,
                                           const ElevationField& elevation = {});

// Ordinary-kriging interpolation of a reference station's observed
// theta-hat row over the grid; values clamped into [1, 2].
std::vector<ThetaMapPoint> observed_theta_map(const ExtremalMatrix& theta_hat,
                                              const StationSet& stations,
                                              const std::string& reference_id,
                                              double resolution_km, const MapBBox& bbox,
                                              const ElevationField& elevation = {});

void write_theta_map_csv(const std::string& path, const std::vector<ThetaMapPoint>& points);

// Bounding box of the stations, padded by the given margin (km).
MapBBox station_bbox(const StationSet& stations, double margin_km = 10.0);

}  // namespace latmax

#endif
