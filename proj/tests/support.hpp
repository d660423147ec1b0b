#pragma once

// Shared helpers for the unit tests: seeded random draws and small
// closed-form surfaces.

#include <cmath>
#include <random>

#include "spinflat/cquat.hpp"
#include "spinflat/grid.hpp"
#include "spinflat/mesh.hpp"
#include "spinflat/spin.hpp"

namespace testing {

using namespace spinflat;

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double real(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  cplx complex(double r = 1.0) { return {real(-r, r), real(-r, r)}; }
  CQuat cquat(double r = 1.0) { return {complex(r), complex(r), complex(r), complex(r)}; }
  MinkVec mink(double r = 1.0) { return {real(-r, r), real(-r, r), real(-r, r), real(-r, r)}; }

  // exp of a random pure element: always in Spin(1,3), away from overflow.
  SpinElement spin(double r = 1.0) {
    return SpinElement(exp_pure({0.0, complex(r), complex(r), complex(r)}));
  }

 private:
  std::mt19937_64 rng_;
};

template <typename Fn>
SurfaceMesh mesh_from(const GridDomain& grid, Fn&& fn) {
  SurfaceMesh m;
  m.grid = grid;
  m.F = sample(grid, [&](std::size_t j, std::size_t k) { return fn(grid.x(j), grid.y(k)); });
  return m;
}

// The worked flat example: (cosh 2y, -cos 2x, sinh 2y, -sin 2x) / 2.
inline MinkVec worked_surface(double x, double y) {
  return {0.5 * std::cosh(2 * y), -0.5 * std::cos(2 * x), 0.5 * std::sinh(2 * y),
          -0.5 * std::sin(2 * x)};
}

}  // namespace testing
