#pragma once

// Rigid comparison of two point sets in R^{1,3} up to a Lorentzian motion.
//
// An affine map x -> L x + t is fitted by linear least squares (Euclidean
// residual in the coordinates) from the reference onto the target. The
// result is accepted as a Lorentz motion only if L^T eta L = eta holds to
// the caller's tolerance; the residual of the fit is the aligned deviation.

#include <array>
#include <vector>

#include "spinflat/cquat.hpp"

namespace spinflat {

using Mat4 = std::array<std::array<double, 4>, 4>;

struct Alignment {
  Mat4 L{};
  MinkVec t;
  double max_deviation = 0;   // max_n |L r_n + t - f_n| (Euclidean)
  double lorentz_defect = 0;  // Frobenius norm of L^T eta L - eta
  int rank = 0;               // rank of the [r, 1] design matrix; 5 is full
  bool determined() const { return rank == 5; }
};

// Throws std::invalid_argument when the inputs differ in size or have fewer
// than 5 points.
Alignment align_lorentz(const std::vector<MinkVec>& reference,
                        const std::vector<MinkVec>& target);

MinkVec apply(const Alignment& a, const MinkVec& r);

}  // namespace spinflat
