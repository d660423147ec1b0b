#pragma once

// Flat surfaces in hyperbolic space H^3 = { F in Herm(2) : det F = 1, tr F > 0 }
// from holomorphic data: B^{-1} dB = [[0, theta], [omega, 0]] dz, F = B B^*.
//
// Herm(2) is identified with R^{1,3} by
//   [[a, b], [conj(b), d]]  <->  ((a + d)/2, (a - d)/2, Re b, Im b),
// so that the Minkowski norm is -det.

#include <optional>

#include "spinflat/detail/sweep.hpp"
#include "spinflat/expr.hpp"
#include "spinflat/mesh.hpp"
#include "spinflat/spin.hpp"

namespace spinflat {

struct SL2Field {
  GridField<Mat2C> B;
  Mat2C B0;
  BaseNode base;
  double max_drift = 0;  // max |det B - 1| before renormalization
  std::size_t renormalized_nodes = 0;
  double path_discrepancy = 0;  // max node-wise Frobenius distance between path orders
};

// RK4 along grid paths like integrate_spin. Throws DetDrift when
// |det B - 1| exceeds 0.1, std::invalid_argument when |det B0 - 1| > tol_spin.
SL2Field integrate_sl2(const ExprFn& theta, const ExprFn& omega, const Mat2C& B0,
                       const GridDomain& grid, BaseNode base);
GridField<Mat2C> integrate_sl2_path(const ExprFn& theta, const ExprFn& omega, const Mat2C& B0,
                                    const GridDomain& grid, BaseNode base, PathOrder order,
                                    double* max_drift = nullptr,
                                    std::size_t* renormalized = nullptr);

MinkVec herm_to_mink(const Mat2C& F);
Mat2C mink_to_herm(const MinkVec& x);

struct H3Mesh {
  GridDomain grid;
  GridField<Mat2C> F;
  GridField<MinkVec> X;
  double max_hermiticity_defect = 0;
  double max_det_defect = 0;  // |det F - 1|
  double min_x0 = 0;

  SurfaceMesh as_surface() const;
};

H3Mesh immerse_h3(const SL2Field& field, const GridDomain& grid);

struct H3Report {
  double max_abs_K = 0;            // interior maximum of the intrinsic curvature
  double regularity_margin = 0;    // see check_h3_flat
  bool margin_from_coefficients = false;
};

// Regularity margin: min over nodes of ||theta| - |omega|| when both
// coefficient fields are given, otherwise the square root of the smallest
// eigenvalue of the induced Gram matrix. Throws NotImmersed when the margin
// is below tol_regular, before any curvature is computed.
H3Report check_h3_flat(const H3Mesh& mesh, const GridField<cplx>* theta = nullptr,
                       const GridField<cplx>* omega = nullptr);

// (x1, x2, x3) / (1 + x0), inside the unit ball for points of H^3.
std::array<double, 3> poincare_ball(const MinkVec& x);

}  // namespace spinflat
