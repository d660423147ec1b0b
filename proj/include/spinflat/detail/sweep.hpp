#pragma once

#include <sstream>
#include <string>

#include "spinflat/grid.hpp"
#include "spinflat/mesh.hpp"

namespace spinflat {

enum class PathOrder { RowsFirst, ColumnsFirst };

namespace detail {

// Fills a field by stepping from the base node along grid lines.
// step(value_at_from, j_from, k_from, j_to, k_to) returns the value at "to".
template <typename T, typename Step>
GridField<T> sweep(const GridDomain& grid, BaseNode b, PathOrder order, const T& init,
                   Step&& step) {
  GridField<T> out(grid, init);
  auto along_x = [&](std::size_t k) {
    for (std::size_t j = b.j + 1; j < grid.nx; ++j) out(j, k) = step(out(j - 1, k), j - 1, k, j, k);
    for (std::size_t j = b.j; j-- > 0;) out(j, k) = step(out(j + 1, k), j + 1, k, j, k);
  };
  auto along_y = [&](std::size_t j) {
    for (std::size_t k = b.k + 1; k < grid.ny; ++k) out(j, k) = step(out(j, k - 1), j, k - 1, j, k);
    for (std::size_t k = b.k; k-- > 0;) out(j, k) = step(out(j, k + 1), j, k + 1, j, k);
  };
  if (order == PathOrder::RowsFirst) {
    along_x(b.k);
    for (std::size_t j = 0; j < grid.nx; ++j) along_y(j);
  } else {
    along_y(b.j);
    for (std::size_t k = 0; k < grid.ny; ++k) along_x(k);
  }
  return out;
}

inline std::string node_name(const GridDomain& grid, std::size_t j, std::size_t k) {
  std::ostringstream os;
  os << "node (" << j << ", " << k << "), z = " << grid.x(j) << (grid.y(k) < 0 ? " - " : " + ")
     << std::abs(grid.y(k)) << "i";
  return os.str();
}

}  // namespace detail
}  // namespace spinflat
