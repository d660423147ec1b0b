#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spinflat/cquat.hpp"
#include "spinflat/grid.hpp"

namespace spinflat {

// Immersion values F on a grid, plus free-form generation metadata.
struct SurfaceMesh {
  GridDomain grid;
  GridField<MinkVec> F;
  std::vector<std::pair<std::string, std::string>> provenance;
};

// Node from which path integrations start.
struct BaseNode {
  std::size_t j = 0, k = 0;
};

// Node nearest to z = 0 (clamped into the grid).
BaseNode base_near_origin(const GridDomain& grid);

}  // namespace spinflat
