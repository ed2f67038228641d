#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "latmax/brown_resnick.hpp"
#include "latmax/errors.hpp"
#include "latmax/maps.hpp"
#include "latmax/simulator.hpp"

using namespace latmax;
namespace fs = std::filesystem;

namespace {
StationSet grid_stations() {
  StationSet st;
  st.coords.resize(9, 3);
  int r = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      st.ids.push_back("g" + std::to_string(r));
      st.coords.row(r++) << 10.0 * i, 10.0 * j, 500.0;
    }
  return st;
}
}  // namespace

TEST_SUITE("maps") {
  TEST_CASE("station bbox pads the hull") {
    StationSet st = grid_stations();
    MapBBox b = station_bbox(st, 5.0);
    CHECK(b.e_min == -5.0);
    CHECK(b.e_max == 25.0);
    CHECK(b.n_min == -5.0);
    CHECK(b.n_max == 25.0);
  }

  TEST_CASE("elevation field falls back to its constant") {
    ElevationField f;
    CHECK(f.at(3.0, 4.0) == 500.0);
    ElevationField g;
    g.raster = Matrix(2, 3);
    *g.raster << 0, 0, 100, 10, 10, 900;
    CHECK(g.at(1.0, 1.0) == 100.0);
    CHECK(g.at(9.0, 9.0) == 900.0);
  }

  TEST_CASE("classical model map equals the closed form on the grid") {
    StationSet st = grid_stations();
    FittedModel m;
    m.method = FitMethod::Classical;
    m.sigma = 2.0;
    m.cov = CovFunction::power_exponential(1.0);
    m.climate.c1 = m.climate.c2 = 0.1;
    m.climate.c3 = 0.0;
    MapBBox b{0.0, 20.0, 0.0, 20.0};
    auto pts = model_theta_map(m, st, "g0", 10.0, b);
    REQUIRE(pts.size() == 9);
    for (const auto& pt : pts) {
      Vector loc(3);
      loc << pt.easting, pt.northing, pt.elevation;
      Vector ref = st.coords.row(0).transpose();
      double expect =
          extremal_coefficient(2.0, cov_value(m.cov, m.climate.distance(ref, loc)));
      CHECK(pt.theta == doctest::Approx(expect).epsilon(1e-12));
      CHECK(pt.theta >= 1.0);
      CHECK(pt.theta <= 2.0);
    }
    // theta = 1 at the reference itself.
    CHECK(pts.front().theta == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("observed map interpolates theta-hat and stays in range") {
    StationSet st = grid_stations();
    SimSpec spec;
    spec.coords = st.coords.leftCols(2) / 8.0;
    spec.cov = CovFunction::power_exponential(1.0);
    spec.sigma = 1.5;
    spec.replicates = 500;
    spec.seed = 17;
    FrechetMatrix z = simulate_field(spec);
    z.station_ids = st.ids;
    ExtremalMatrix hat = extremal_matrix(z);
    MapBBox b = station_bbox(st, 2.0);
    auto pts = observed_theta_map(hat, st, "g4", 4.0, b);
    CHECK(!pts.empty());
    double lo = 2.0, hi = 1.0;
    for (const auto& pt : pts) {
      CHECK(pt.theta >= 1.0);
      CHECK(pt.theta <= 2.0);
      lo = std::min(lo, pt.theta);
      hi = std::max(hi, pt.theta);
    }
    CHECK(lo < 1.4);  // near the reference station dependence is strong
    CHECK(hi > lo);
  }

  TEST_CASE("classical theta contours are ellipses") {
    // At fixed elevation the classical distance is a quadratic form of the
    // planar offset, so every theta level set must be an ellipse. Extract a
    // contour from the gridded map and fit a general conic.
    FittedModel m;
    m.method = FitMethod::Classical;
    m.sigma = 2.0;
    m.cov = CovFunction::power_exponential(1.2);
    m.climate = ClimateTransform{0.5, 0.02, 0.045, 0.0};
    StationSet st;
    st.ids = {"ref"};
    st.coords.resize(1, 3);
    st.coords << 0.0, 0.0, 500.0;
    MapBBox b{-30.0, 30.0, -30.0, 30.0};
    auto pts = model_theta_map(m, st, "ref", 0.5, b);
    int cols = 121;
    double level = 1.5;

    std::vector<std::pair<double, double>> contour;
    auto at = [&](int row, int col) -> const ThetaMapPoint& { return pts[row * cols + col]; };
    for (int row = 0; row < 121; ++row)
      for (int col = 0; col + 1 < cols; ++col) {
        double f0 = at(row, col).theta - level, f1 = at(row, col + 1).theta - level;
        if (f0 == 0.0 || f0 * f1 >= 0.0) continue;
        double t = f0 / (f0 - f1);
        contour.emplace_back(at(row, col).easting +
                                 t * (at(row, col + 1).easting - at(row, col).easting),
                             at(row, col).northing);
      }
    REQUIRE(contour.size() >= 30);

    // Least-squares conic x^2, xy, y^2, x, y, 1 via the smallest singular
    // vector, then geometric residual |Q| / |grad Q| at each contour point.
    Matrix Amat(static_cast<int>(contour.size()), 6);
    for (std::size_t i = 0; i < contour.size(); ++i) {
      auto [x, y] = contour[i];
      Amat.row(static_cast<int>(i)) << x * x, x * y, y * y, x, y, 1.0;
    }
    Eigen::JacobiSVD<Matrix> svd(Amat, Eigen::ComputeThinV);
    Vector q = svd.matrixV().col(5);
    double extent = 0.0;
    for (auto [x, y] : contour)
      for (auto [u, v] : contour)
        extent = std::max(extent, std::hypot(x - u, y - v));
    double axis = extent / 2.0;
    for (auto [x, y] : contour) {
      double Q = q[0] * x * x + q[1] * x * y + q[2] * y * y + q[3] * x + q[4] * y + q[5];
      double gx = 2.0 * q[0] * x + q[1] * y + q[3];
      double gy = q[1] * x + 2.0 * q[2] * y + q[4];
      double dist = std::abs(Q) / std::max(std::hypot(gx, gy), 1e-12);
      CHECK(dist < 0.01 * axis);
    }
  }

  TEST_CASE("map csv writer emits one row per point") {
    fs::path tmp = fs::temp_directory_path() / ("latmax_map_" + std::to_string(::getpid()));
    std::vector<ThetaMapPoint> pts = {{0.0, 1.0, 500.0, 1.25}, {2.0, 3.0, 600.0, 1.75}};
    write_theta_map_csv(tmp.string(), pts);
    std::ifstream in(tmp);
    std::string line;
    std::getline(in, line);
    CHECK(line == "easting,northing,elevation,theta");
    int rows = 0;
    while (std::getline(in, line))
      if (!line.empty()) ++rows;
    CHECK(rows == 2);
    fs::remove(tmp);
  }

  TEST_CASE("invalid grids are rejected") {
    StationSet st = grid_stations();
    FittedModel m;
    m.method = FitMethod::Classical;
    m.sigma = 2.0;
    m.cov = CovFunction::power_exponential(1.0);
    MapBBox b{0.0, 20.0, 0.0, 20.0};
    CHECK_THROWS_AS(model_theta_map(m, st, "g0", 0.0, b), OutOfRange);
    MapBBox bad{10.0, 0.0, 0.0, 20.0};
    CHECK_THROWS_AS(model_theta_map(m, st, "g0", 5.0, bad), OutOfRange);
  }
}
