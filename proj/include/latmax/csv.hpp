#ifndef LATMAX_CSV_HPP
#define LATMAX_CSV_HPP

#include <map>
#include <string>
#include <vector>

#include "latmax/gev.hpp"
#include "latmax/mds.hpp"
#include "latmax/types.hpp"

namespace latmax {

// All files are UTF-8, comma-separated, '.' decimal, mandatory header row.

// `station_id,easting,northing,elevation`
StationSet ingest_stations(const std::string& path);
void write_stations_csv(const std::string& path, const StationSet& stations);

// `year,<station_id_1>,...,<station_id_n>`, one row per year.
MaximaMatrix ingest_maxima(const std::string& path);
void write_maxima_csv(const std::string& path, const MaximaMatrix& data);

FrechetMatrix ingest_frechet(const std::string& path);
void write_frechet_csv(const std::string& path, const FrechetMatrix& data);

// Station id sets of the two files must agree (order taken from maxima).
void check_station_agreement(const StationSet& stations, const std::vector<std::string>& ids);

// Reorders stations to match the given id order.
StationSet align_stations(const StationSet& stations, const std::vector<std::string>& ids);

// `station_id,mu,sigma,xi,J`
void write_gev_params_csv(const std::string& path, const std::vector<std::string>& ids,
                          const std::vector<MarginFit>& fits);
std::pair<std::vector<std::string>, std::vector<MarginFit>> read_gev_params_csv(
    const std::string& path);

// Square matrix with station-id header row and column.
void write_square_matrix_csv(const std::string& path, const std::vector<std::string>& ids,
                             const Matrix& m);
std::pair<std::vector<std::string>, Matrix> read_square_matrix_csv(const std::string& path);

// `station_id,y1,...,yd`
void write_embedding_csv(const std::string& path, const std::vector<std::string>& ids,
                         const Embedding& emb);
std::pair<std::vector<std::string>, Embedding> read_embedding_csv(const std::string& path);

// Flat key=value configuration; '#' starts a comment line.
std::map<std::string, std::string> read_config(const std::string& path);

bool file_exists(const std::string& path);

}  // namespace latmax

#endif
