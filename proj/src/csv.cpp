#include "latmax/csv.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "latmax/errors.hpp"

namespace latmax {

namespace {
std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& file, int line, int col) {
  std::string t = strip(s);
  if (t.empty())
    throw MissingData(file + ": empty cell at line " + std::to_string(line) + ", column " +
                      std::to_string(col));
  try {
    size_t pos = 0;
    double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ParseError(file + ": cannot parse number '" + t + "' at line " +
                     std::to_string(line) + ", column " + std::to_string(col));
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = strip(line);
    if (!t.empty()) lines.push_back(t);
  }
  return lines;
}
}  // namespace

bool file_exists(const std::string& path) { return std::filesystem::exists(path); }

StationSet ingest_stations(const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty file");
  auto header = split_line(lines[0]);
  if (header.size() != 4 || strip(header[0]) != "station_id")
    throw SchemaMismatch(path + ": expected header station_id,easting,northing,elevation");
  StationSet out;
  out.coords.resize(static_cast<Eigen::Index>(lines.size()) - 1, 3);
  for (size_t r = 1; r < lines.size(); ++r) {
    auto f = split_line(lines[r]);
    if (f.size() != 4)
      throw ParseError(path + ": expected 4 fields at line " + std::to_string(r + 1));
    std::string id = strip(f[0]);
    if (std::find(out.ids.begin(), out.ids.end(), id) != out.ids.end())
      throw SchemaMismatch(path + ": duplicate station id '" + id + "'");
    out.ids.push_back(id);
    for (int c = 0; c < 3; ++c)
      out.coords(static_cast<Eigen::Index>(r) - 1, c) =
          parse_double(f[c + 1], path, static_cast<int>(r + 1), c + 2);
  }
  return out;
}

void write_stations_csv(const std::string& path, const StationSet& stations) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << "station_id,easting,northing,elevation\n";
  out.precision(17);
  for (int i = 0; i < stations.size(); ++i)
    out << stations.ids[i] << ',' << stations.coords(i, 0) << ',' << stations.coords(i, 1)
        << ',' << stations.coords(i, 2) << '\n';
}

namespace {
std::pair<Matrix, std::pair<std::vector<std::string>, std::vector<int>>> read_year_table(
    const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty file");
  auto header = split_line(lines[0]);
  if (header.size() < 2 || strip(header[0]) != "year")
    throw SchemaMismatch(path + ": expected header year,<station ids...>");
  std::vector<std::string> ids;
  for (size_t c = 1; c < header.size(); ++c) ids.push_back(strip(header[c]));

  Matrix values(static_cast<Eigen::Index>(lines.size()) - 1,
                static_cast<Eigen::Index>(ids.size()));
  std::vector<int> years;
  for (size_t r = 1; r < lines.size(); ++r) {
    auto f = split_line(lines[r]);
    if (f.size() != header.size())
      throw ParseError(path + ": wrong field count at line " + std::to_string(r + 1));
    years.push_back(static_cast<int>(parse_double(f[0], path, static_cast<int>(r + 1), 1)));
    for (size_t c = 1; c < f.size(); ++c) {
      std::string cell = strip(f[c]);
      if (cell.empty())
        throw MissingData(path + ": missing maximum for station '" + ids[c - 1] +
                          "', year " + std::to_string(years.back()));
      values(static_cast<Eigen::Index>(r) - 1, static_cast<Eigen::Index>(c) - 1) =
          parse_double(cell, path, static_cast<int>(r + 1), static_cast<int>(c + 1));
    }
  }
  return {values, {ids, years}};
}
}  // namespace

MaximaMatrix ingest_maxima(const std::string& path) {
  auto [values, meta] = read_year_table(path);
  MaximaMatrix out;
  out.values = values;
  out.station_ids = meta.first;
  out.years = meta.second;
  for (Eigen::Index r = 0; r < out.values.rows(); ++r)
    for (Eigen::Index c = 0; c < out.values.cols(); ++c)
      if (!std::isfinite(out.values(r, c)) || out.values(r, c) <= 0.0)
        throw ParseError(path + ": non-positive or non-finite maximum for station '" +
                         out.station_ids[c] + "', year " + std::to_string(out.years[r]));
  return out;
}

void write_maxima_csv(const std::string& path, const MaximaMatrix& data) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << "year";
  for (const auto& id : data.station_ids) out << ',' << id;
  out << '\n';
  out.precision(17);
  for (int r = 0; r < data.n_years(); ++r) {
    out << data.years[r];
    for (int c = 0; c < data.n_stations(); ++c) out << ',' << data.values(r, c);
    out << '\n';
  }
}

FrechetMatrix ingest_frechet(const std::string& path) {
  auto [values, meta] = read_year_table(path);
  FrechetMatrix out;
  out.values = values;
  out.station_ids = meta.first;
  for (Eigen::Index r = 0; r < out.values.rows(); ++r)
    for (Eigen::Index c = 0; c < out.values.cols(); ++c)
      if (!(out.values(r, c) > 0.0))
        throw ParseError(path + ": non-positive Frechet value for station '" +
                         out.station_ids[c] + "'");
  return out;
}

void write_frechet_csv(const std::string& path, const FrechetMatrix& data) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << "year";
  for (const auto& id : data.station_ids) out << ',' << id;
  out << '\n';
  out.precision(17);
  for (int r = 0; r < data.n_years(); ++r) {
    out << (r + 1);
    for (int c = 0; c < data.n_stations(); ++c) out << ',' << data.values(r, c);
    out << '\n';
  }
}

void check_station_agreement(const StationSet& stations, const std::vector<std::string>& ids) {
  for (const auto& id : ids)
    if (std::find(stations.ids.begin(), stations.ids.end(), id) == stations.ids.end())
      throw SchemaMismatch("station '" + id + "' present in maxima but not in station file");
  for (const auto& id : stations.ids)
    if (std::find(ids.begin(), ids.end(), id) == ids.end())
      throw SchemaMismatch("station '" + id + "' present in station file but not in maxima");
}

StationSet align_stations(const StationSet& stations, const std::vector<std::string>& ids) {
  check_station_agreement(stations, ids);
  StationSet out;
  out.coords.resize(static_cast<Eigen::Index>(ids.size()), 3);
  for (size_t i = 0; i < ids.size(); ++i) {
    int j = stations.index_of(ids[i]);
    out.ids.push_back(ids[i]);
    out.coords.row(static_cast<Eigen::Index>(i)) = stations.coords.row(j);
  }
  return out;
}

void write_gev_params_csv(const std::string& path, const std::vector<std::string>& ids,
                          const std::vector<MarginFit>& fits) {
  if (ids.size() != fits.size())
    throw DimensionMismatch("write_gev_params_csv: ids/fits size mismatch");
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << "station_id,mu,sigma,xi,J\n";
  out.precision(17);
  for (size_t i = 0; i < ids.size(); ++i)
    out << ids[i] << ',' << fits[i].params.mu << ',' << fits[i].params.sigma << ','
        << fits[i].params.xi << ',' << fits[i].neighbor_count << '\n';
}

std::pair<std::vector<std::string>, std::vector<MarginFit>> read_gev_params_csv(
    const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty file");
  if (strip(lines[0]) != "station_id,mu,sigma,xi,J")
    throw SchemaMismatch(path + ": expected header station_id,mu,sigma,xi,J");
  std::vector<std::string> ids;
  std::vector<MarginFit> fits;
  for (size_t r = 1; r < lines.size(); ++r) {
    auto f = split_line(lines[r]);
    if (f.size() != 5)
      throw ParseError(path + ": expected 5 fields at line " + std::to_string(r + 1));
    ids.push_back(strip(f[0]));
    MarginFit m;
    m.params.mu = parse_double(f[1], path, static_cast<int>(r + 1), 2);
    m.params.sigma = parse_double(f[2], path, static_cast<int>(r + 1), 3);
    m.params.xi = parse_double(f[3], path, static_cast<int>(r + 1), 4);
    m.neighbor_count = static_cast<int>(parse_double(f[4], path, static_cast<int>(r + 1), 5));
    fits.push_back(m);
  }
  return {ids, fits};
}

void write_square_matrix_csv(const std::string& path, const std::vector<std::string>& ids,
                             const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() != static_cast<Eigen::Index>(ids.size()))
    throw DimensionMismatch("write_square_matrix_csv: dimension mismatch");
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << "station_id";
  for (const auto& id : ids) out << ',' << id;
  out << '\n';
  out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << ids[i];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << m(i, j);
    out << '\n';
  }
}

std::pair<std::vector<std::string>, Matrix> read_square_matrix_csv(const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty file");
  auto header = split_line(lines[0]);
  if (header.size() < 2 || strip(header[0]) != "station_id")
    throw SchemaMismatch(path + ": expected square matrix with station_id header");
  std::vector<std::string> ids;
  for (size_t c = 1; c < header.size(); ++c) ids.push_back(strip(header[c]));
  const auto n = static_cast<Eigen::Index>(ids.size());
  if (static_cast<Eigen::Index>(lines.size()) - 1 != n)
    throw SchemaMismatch(path + ": row count does not match header");
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    auto f = split_line(lines[static_cast<size_t>(r) + 1]);
    if (static_cast<Eigen::Index>(f.size()) != n + 1)
      throw ParseError(path + ": wrong field count at line " + std::to_string(r + 2));
    if (strip(f[0]) != ids[static_cast<size_t>(r)])
      throw SchemaMismatch(path + ": row label order differs from header");
    for (Eigen::Index c = 0; c < n; ++c)
      m(r, c) = parse_double(f[static_cast<size_t>(c) + 1], path, static_cast<int>(r + 2),
                             static_cast<int>(c + 2));
  }
  return {ids, m};
}

void write_embedding_csv(const std::string& path, const std::vector<std::string>& ids,
                         const Embedding& emb) {
  if (static_cast<int>(ids.size()) != emb.size())
    throw DimensionMismatch("write_embedding_csv: ids/embedding size mismatch");
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << "station_id";
  for (int c = 0; c < emb.dim(); ++c) out << ",y" << (c + 1);
  out << '\n';
  out.precision(17);
  for (int i = 0; i < emb.size(); ++i) {
    out << ids[i];
    for (int c = 0; c < emb.dim(); ++c) out << ',' << emb.coords(i, c);
    out << '\n';
  }
}

std::pair<std::vector<std::string>, Embedding> read_embedding_csv(const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path + ": empty file");
  auto header = split_line(lines[0]);
  if (header.size() < 2 || strip(header[0]) != "station_id")
    throw SchemaMismatch(path + ": expected header station_id,y1,...");
  const auto d = static_cast<Eigen::Index>(header.size()) - 1;
  std::vector<std::string> ids;
  Embedding emb;
  emb.coords.resize(static_cast<Eigen::Index>(lines.size()) - 1, d);
  for (size_t r = 1; r < lines.size(); ++r) {
    auto f = split_line(lines[r]);
    if (static_cast<Eigen::Index>(f.size()) != d + 1)
      throw ParseError(path + ": wrong field count at line " + std::to_string(r + 1));
    ids.push_back(strip(f[0]));
    for (Eigen::Index c = 0; c < d; ++c)
      emb.coords(static_cast<Eigen::Index>(r) - 1, c) =
          parse_double(f[static_cast<size_t>(c) + 1], path, static_cast<int>(r + 1),
                       static_cast<int>(c + 2));
  }
  return {ids, emb};
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::map<std::string, std::string> cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = strip(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ": expected key=value at line " + std::to_string(line_no));
    cfg[strip(t.substr(0, eq))] = strip(t.substr(eq + 1));
  }
  return cfg;
}

}  // namespace latmax
