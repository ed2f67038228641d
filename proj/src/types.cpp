#include "latmax/types.hpp"

#include "latmax/errors.hpp"

namespace latmax {

int StationSet::index_of(const std::string& id) const {
  for (size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return static_cast<int>(i);
  throw UnknownStation("unknown station id '" + id + "'");
}

}  // namespace latmax
