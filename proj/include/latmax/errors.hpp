#ifndef LATMAX_ERRORS_HPP
#define LATMAX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace latmax {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonConvergence : Error {
  explicit NonConvergence(const std::string& msg) : Error(msg) {}
};
struct DegenerateSample : Error {
  explicit DegenerateSample(const std::string& msg) : Error(msg) {}
};
struct OutOfRange : Error {
  explicit OutOfRange(const std::string& msg) : Error(msg) {}
};
struct DegenerateDependence : Error {
  explicit DegenerateDependence(const std::string& msg) : Error(msg) {}
};
struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};
struct DimensionError : Error {
  explicit DimensionError(const std::string& msg) : Error(msg) {}
};
struct ZeroDissimilarity : Error {
  explicit ZeroDissimilarity(const std::string& msg) : Error(msg) {}
};
struct NonFiniteGradient : Error {
  explicit NonFiniteGradient(const std::string& msg) : Error(msg) {}
};
struct SingularCovariance : Error {
  explicit SingularCovariance(const std::string& msg) : Error(msg) {}
};
struct EmptyGrid : Error {
  explicit EmptyGrid(const std::string& msg) : Error(msg) {}
};
struct MissingDimension : Error {
  explicit MissingDimension(const std::string& msg) : Error(msg) {}
};
struct InsufficientStations : Error {
  explicit InsufficientStations(const std::string& msg) : Error(msg) {}
};
struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(msg) {}
};
struct SchemaMismatch : Error {
  explicit SchemaMismatch(const std::string& msg) : Error(msg) {}
};
struct MissingData : Error {
  explicit MissingData(const std::string& msg) : Error(msg) {}
};
struct UnknownStation : Error {
  explicit UnknownStation(const std::string& msg) : Error(msg) {}
};

}  // namespace latmax

#endif
