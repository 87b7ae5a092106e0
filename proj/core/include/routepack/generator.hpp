#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "routepack/network.hpp"

namespace routepack {

struct GenParams {
  int nodes = 10;
  int routes_min = 5;
  int routes_max = 5;
  int stops_min = 3;
  int stops_max = 5;
  std::uint64_t seed = 42;
  // Road grid is grid x grid jittered points; 0 picks a size from `nodes`.
  int grid = 0;
  // Share of removable road edges dropped (connectivity is kept).
  double removal = 0.15;

  /// Throws ValidationError for empty ranges or more stops than nodes.
  void validate() const;
};

/// Synthetic road grid in the unit lon/lat box, `nodes` major vertices joined
/// by a connected node graph, and routes that walk 3..5 distinct nodes along
/// shortest road paths. Fully determined by the seed.
RouteNetwork generate_network(const GenParams& params);

struct Trial {
  std::string a;
  std::string b;
  bool connected = false;  // some route stops at both
};

/// Every unordered pair of major vertices with whether one route links them.
std::vector<Trial> trials(const RouteNetwork& net);

/// A single straight corridor shared by `routes` routes, each entering and
/// leaving through its own spoke. Entry and exit spoke angles are pairwise
/// at least 40 degrees apart.
RouteNetwork generate_corridor(int routes, std::uint64_t seed);

}  // namespace routepack
