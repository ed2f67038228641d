#ifndef LATMAX_TYPES_HPP
#define LATMAX_TYPES_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace latmax {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Station identifiers with planar coordinates (easting km, northing km)
// and elevation (m). Anchor of every physical-space computation.
struct StationSet {
  std::vector<std::string> ids;
  Matrix coords;  // n x 3

  int size() const { return static_cast<int>(ids.size()); }
  int index_of(const std::string& id) const;
};

// p years x n stations of seasonal block maxima (mm/day).
struct MaximaMatrix {
  Matrix values;  // p x n
  std::vector<std::string> station_ids;
  std::vector<int> years;

  int n_years() const { return static_cast<int>(values.rows()); }
  int n_stations() const { return static_cast<int>(values.cols()); }
};

// Same layout on the unit-Frechet scale; all entries strictly positive.
struct FrechetMatrix {
  Matrix values;  // p x n
  std::vector<std::string> station_ids;

  int n_years() const { return static_cast<int>(values.rows()); }
  int n_stations() const { return static_cast<int>(values.cols()); }
};

}  // namespace latmax

#endif
