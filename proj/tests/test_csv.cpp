#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "latmax/csv.hpp"
#include "latmax/errors.hpp"

using namespace latmax;
namespace fs = std::filesystem;

namespace {
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("latmax_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}
}  // namespace

TEST_SUITE("csv") {
  TEST_CASE("stations roundtrip") {
    TempDir tmp;
    StationSet st;
    st.ids = {"alp_01", "alp_02"};
    st.coords.resize(2, 3);
    st.coords << 600.25, 200.5, 1200.0, 610.0, 190.75, 450.0;
    write_stations_csv(tmp.file("st.csv"), st);
    StationSet back = ingest_stations(tmp.file("st.csv"));
    CHECK(back.ids == st.ids);
    CHECK((back.coords - st.coords).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.index_of("alp_02") == 1);
    CHECK_THROWS_AS(back.index_of("nope"), UnknownStation);
  }

  TEST_CASE("maxima roundtrip preserves years and ids") {
    TempDir tmp;
    MaximaMatrix m;
    m.station_ids = {"a", "b", "c"};
    m.years = {1961, 1962};
    m.values.resize(2, 3);
    m.values << 10.5, 20.25, 30.0, 11.0, 21.0, 29.5;
    write_maxima_csv(tmp.file("max.csv"), m);
    MaximaMatrix back = ingest_maxima(tmp.file("max.csv"));
    CHECK(back.station_ids == m.station_ids);
    CHECK(back.years == m.years);
    CHECK((back.values - m.values).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("frechet roundtrip keeps full precision") {
    TempDir tmp;
    FrechetMatrix z;
    z.station_ids = {"a", "b"};
    z.values.resize(2, 2);
    z.values << 0.123456789012345678, 1.0 / 3.0, 7.25, 1e-7;
    write_frechet_csv(tmp.file("z.csv"), z);
    FrechetMatrix back = ingest_frechet(tmp.file("z.csv"));
    CHECK((back.values - z.values).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("missing cell names station and year") {
    TempDir tmp;
    write_text(tmp.file("bad.csv"), "year,a,b\n1961,1.0,2.0\n1962,,2.5\n");
    try {
      ingest_maxima(tmp.file("bad.csv"));
      FAIL("expected MissingData");
    } catch (const MissingData& e) {
      std::string msg = e.what();
      CHECK(msg.find("a") != std::string::npos);
      CHECK(msg.find("1962") != std::string::npos);
    }
  }

  TEST_CASE("malformed rows raise ParseError") {
    TempDir tmp;
    write_text(tmp.file("short.csv"), "year,a,b\n1961,1.0\n");
    CHECK_THROWS_AS(ingest_maxima(tmp.file("short.csv")), ParseError);
    write_text(tmp.file("hdr.csv"), "station,easting\n");
    CHECK_THROWS_AS(ingest_stations(tmp.file("hdr.csv")), SchemaMismatch);
    CHECK_THROWS_AS(ingest_stations(tmp.file("does_not_exist.csv")), ParseError);
  }

  TEST_CASE("station agreement and alignment") {
    StationSet st;
    st.ids = {"b", "a"};
    st.coords.resize(2, 3);
    st.coords << 1, 1, 1, 2, 2, 2;
    CHECK_NOTHROW(check_station_agreement(st, {"a", "b"}));
    try {
      check_station_agreement(st, {"a", "c"});
      FAIL("expected SchemaMismatch");
    } catch (const SchemaMismatch& e) {
      CHECK(std::string(e.what()).find("c") != std::string::npos);
    }
    StationSet aligned = align_stations(st, {"a", "b"});
    CHECK(aligned.ids == std::vector<std::string>{"a", "b"});
    CHECK(aligned.coords(0, 0) == 2.0);
    CHECK(aligned.coords(1, 0) == 1.0);
  }

  TEST_CASE("gev params roundtrip") {
    TempDir tmp;
    std::vector<MarginFit> fits(2);
    fits[0].params = {10.25, 2.5, 0.1};
    fits[0].neighbor_count = 3;
    fits[1].params = {8.0, 1.75, 0.0};
    fits[1].neighbor_count = 0;
    write_gev_params_csv(tmp.file("gev.csv"), {"a", "b"}, fits);
    auto [ids, back] = read_gev_params_csv(tmp.file("gev.csv"));
    CHECK(ids == std::vector<std::string>{"a", "b"});
    CHECK(back[0].params.mu == 10.25);
    CHECK(back[0].neighbor_count == 3);
    CHECK(back[1].params.xi == 0.0);
  }

  TEST_CASE("square matrix roundtrip") {
    TempDir tmp;
    Matrix m(2, 2);
    m << 1.0, 1.0 / 7.0, 1.0 / 7.0, 1.0;
    write_square_matrix_csv(tmp.file("m.csv"), {"x", "y"}, m);
    auto [ids, back] = read_square_matrix_csv(tmp.file("m.csv"));
    CHECK(ids == std::vector<std::string>{"x", "y"});
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("embedding roundtrip") {
    TempDir tmp;
    Embedding e;
    e.coords.resize(2, 3);
    e.coords << 0.1, -0.2, 0.3, 1.5, 2.5, -3.5;
    write_embedding_csv(tmp.file("emb.csv"), {"p", "q"}, e);
    auto [ids, back] = read_embedding_csv(tmp.file("emb.csv"));
    CHECK(ids == std::vector<std::string>{"p", "q"});
    CHECK(back.dim() == 3);
    CHECK((back.coords - e.coords).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("config parsing") {
    TempDir tmp;
    write_text(tmp.file("cfg"),
               "# comment line\n"
               "stations = st.csv\n"
               "sigma_grid=1.0:0.5:3.0\n"
               "\n"
               "d_set = 2,3\n");
    auto cfg = read_config(tmp.file("cfg"));
    CHECK(cfg.size() == 3);
    CHECK(cfg.at("stations") == "st.csv");
    CHECK(cfg.at("sigma_grid") == "1.0:0.5:3.0");
    CHECK(cfg.at("d_set") == "2,3");
    write_text(tmp.file("bad_cfg"), "key_without_value\n");
    CHECK_THROWS_AS(read_config(tmp.file("bad_cfg")), ParseError);
  }

  TEST_CASE("file_exists") {
    TempDir tmp;
    CHECK_FALSE(file_exists(tmp.file("nope")));
    write_text(tmp.file("yes"), "x");
    CHECK(file_exists(tmp.file("yes")));
  }
}
