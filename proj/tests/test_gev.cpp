#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "latmax/errors.hpp"
#include "latmax/gev.hpp"

using namespace latmax;

namespace {
Vector gev_sample(int p, const GevParams& params, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(1e-12, 1.0 - 1e-12);
  Vector out(p);
  for (int i = 0; i < p; ++i) out[i] = gev_quantile(unif(rng), params);
  return out;
}
}  // namespace

TEST_SUITE("gev") {
  TEST_CASE("cdf and quantile invert each other") {
    for (GevParams params : {GevParams{10.0, 2.0, 0.1}, GevParams{0.0, 1.0, 0.0},
                             GevParams{-3.0, 0.5, 0.15}}) {
      for (double p = 0.02; p < 1.0; p += 0.02) {
        double u = gev_quantile(p, params);
        CHECK(gev_cdf(u, params) == doctest::Approx(p).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("gumbel limit is continuous in xi") {
    GevParams gumbel{5.0, 2.0, 0.0};
    GevParams near{5.0, 2.0, 1e-10};
    for (double u : {1.0, 5.0, 9.0})
      CHECK(gev_cdf(u, gumbel) == doctest::Approx(gev_cdf(u, near)).epsilon(1e-8));
  }

  TEST_CASE("loglik closed form, gumbel case") {
    // log f = -log(sigma) - z - exp(-z), z = (u - mu) / sigma.
    GevParams params{1.0, 2.0, 0.0};
    Vector u(1);
    u << 4.0;
    double z = 1.5;
    CHECK(gev_loglik(u, params) ==
          doctest::Approx(-std::log(2.0) - z - std::exp(-z)).epsilon(1e-14));
  }

  TEST_CASE("loglik is -inf outside the support") {
    GevParams params{0.0, 1.0, 0.1};  // support u > -1/0.1 = -10
    Vector u(1);
    u << -11.0;
    CHECK(gev_loglik(u, params) == -std::numeric_limits<double>::infinity());
  }

  TEST_CASE("ml fit recovers known parameters") {
    GevParams truth{10.0, 2.0, 0.1};
    GevParams fit = fit_gev_ml(gev_sample(5000, truth, 101));
    CHECK(fit.mu == doctest::Approx(truth.mu).epsilon(0.02));
    CHECK(fit.sigma == doctest::Approx(truth.sigma).epsilon(0.05));
    CHECK(std::abs(fit.xi - truth.xi) < 0.03);
  }

  TEST_CASE("xi estimate respects the box") {
    // Data generated well outside the box on both sides.
    GevParams heavy{0.0, 1.0, 0.4};
    GevParams fit_h = fit_gev_ml(gev_sample(2000, heavy, 17));
    CHECK(fit_h.xi <= 0.15);
    CHECK(fit_h.xi >= 0.0);
    GevParams light{0.0, 1.0, -0.3};
    GevParams fit_l = fit_gev_ml(gev_sample(2000, light, 19));
    CHECK(fit_l.xi <= 0.15);
    CHECK(fit_l.xi >= 0.0);
  }

  TEST_CASE("constant series is degenerate") {
    Vector u = Vector::Constant(30, 4.2);
    CHECK_THROWS_AS(fit_gev_ml(u), DegenerateSample);
  }

  TEST_CASE("pooled fit with no neighbors equals the plain ml fit") {
    MaximaMatrix data;
    data.station_ids = {"a", "b"};
    data.values.resize(60, 2);
    data.values.col(0) = gev_sample(60, {12.0, 3.0, 0.05}, 5);
    data.values.col(1) = gev_sample(60, {8.0, 1.5, 0.12}, 6);
    GevParams pooled = fit_gev_pooled(0, {}, data);
    GevParams plain = fit_gev_ml(data.values.col(0));
    CHECK(pooled.mu == plain.mu);
    CHECK(pooled.sigma == plain.sigma);
    CHECK(pooled.xi == plain.xi);
  }

  TEST_CASE("pooled fit shares the shape across stations") {
    MaximaMatrix data;
    data.station_ids = {"a", "b", "c"};
    data.values.resize(400, 3);
    for (int j = 0; j < 3; ++j)
      data.values.col(j) = gev_sample(400, {10.0 + j, 2.0, 0.1}, 200u + j);
    GevParams t0 = fit_gev_pooled(0, {1, 2}, data);
    GevParams t1 = fit_gev_pooled(1, {0, 2}, data);
    // Same pooled likelihood up to station relabeling: identical shared xi.
    CHECK(t0.xi == doctest::Approx(t1.xi).epsilon(1e-6));
    CHECK(t0.mu == doctest::Approx(10.0).epsilon(0.05));
  }

  TEST_CASE("nearest neighbors ignore elevation") {
    StationSet st;
    st.ids = {"o", "near", "far", "high"};
    st.coords.resize(4, 3);
    st.coords << 0.0, 0.0, 100.0,   //
        1.0, 0.0, 100.0,            //
        10.0, 0.0, 100.0,           //
        0.5, 0.5, 4000.0;           // close in plan, huge elevation gap
    auto nn = nearest_neighbors(st, 0, 2);
    REQUIRE(nn.size() == 2);
    CHECK(nn[0] == 3);  // sqrt(0.5) < 1
    CHECK(nn[1] == 1);
  }

  TEST_CASE("qq discrepancy vanishes on quantile-perfect data") {
    GevParams params{3.0, 1.2, 0.08};
    int p = 25;
    Vector u(p);
    for (int k = 1; k <= p; ++k) u[k - 1] = gev_quantile(k / (p + 1.0), params);
    CHECK(qq_discrepancy(u, params) < 1e-12);
    // And grows when the location is wrong.
    CHECK(qq_discrepancy(u, {5.0, 1.2, 0.08}) > 1.0);
  }

  TEST_CASE("station margin selection picks a candidate neighborhood") {
    std::mt19937 rng(55);
    StationSet st;
    st.ids = {"a", "b", "c", "d"};
    st.coords.resize(4, 3);
    st.coords << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0;
    MaximaMatrix data;
    data.station_ids = st.ids;
    data.values.resize(80, 4);
    for (int j = 0; j < 4; ++j) data.values.col(j) = gev_sample(80, {10.0, 2.0, 0.1}, 300u + j);
    MarginFit fit = fit_station_margin(0, data, st);
    CHECK((fit.neighbor_count == 0 || fit.neighbor_count == 3));
    CHECK(fit.params.sigma > 0.0);
  }

  TEST_CASE("to_frechet standardizes margins") {
    GevParams truth{10.0, 2.0, 0.1};
    MaximaMatrix data;
    data.station_ids = {"a"};
    data.values.resize(4000, 1);
    data.values.col(0) = gev_sample(4000, truth, 404);
    FrechetMatrix z = to_frechet(data, {truth});
    CHECK(z.values.minCoeff() > 0.0);
    // exp(-1/Z) should be uniform: check mean and the 0.25 quantile mass.
    Vector u = (-z.values.col(0).array().inverse()).exp();
    CHECK(u.mean() == doctest::Approx(0.5).epsilon(0.03));
    CHECK((u.array() < 0.25).cast<double>().mean() == doctest::Approx(0.25).epsilon(0.1));
  }

  TEST_CASE("to_frechet applies each station's own parameters") {
    MaximaMatrix data;
    data.station_ids = {"a", "b"};
    data.values.resize(3, 2);
    data.values << 10.0, 5.0, 12.0, 6.0, 9.0, 4.5;
    std::vector<GevParams> params = {{10.0, 2.0, 0.1}, {5.0, 1.0, 0.0}};
    FrechetMatrix z = to_frechet(data, params);
    for (int t = 0; t < 3; ++t)
      for (int j = 0; j < 2; ++j) {
        double f = std::clamp(gev_cdf(data.values(t, j), params[j]), 1e-12, 1.0 - 1e-12);
        CHECK(z.values(t, j) == doctest::Approx(-1.0 / std::log(f)).epsilon(1e-14));
      }
  }
}
