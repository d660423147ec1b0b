#include "spinflat/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spinflat/errors.hpp"
#include "spinflat/surface.hpp"
#include "spinflat/tolerances.hpp"

namespace spinflat {

using detail::node_name;
using detail::sweep;

GridField<Mat2C> integrate_sl2_path(const ExprFn& theta, const ExprFn& omega, const Mat2C& B0,
                                    const GridDomain& grid, BaseNode base, PathOrder order,
                                    double* max_drift, std::size_t* renormalized) {
  grid.validate();
  const double tol = tolerances().spin;
  if (std::abs(B0.det() - 1.0) > tol)
    throw std::invalid_argument("B0 must have determinant 1");
  double drift = 0;
  std::size_t renorm = 0;
  auto coef = [&](cplx z) { return Mat2C{0.0, theta(z), omega(z), 0.0}; };
  auto step = [&](const Mat2C& B, std::size_t j0, std::size_t k0, std::size_t j1,
                  std::size_t k1) {
    const cplx z0 = grid.z(j0, k0);
    const cplx dz = grid.z(j1, k1) - z0;
    const Mat2C m0 = coef(z0), mm = coef(z0 + 0.5 * dz), m1 = coef(z0 + dz);
    const Mat2C s1 = B * m0;
    const Mat2C s2 = (B + (0.5 * dz) * s1) * mm;
    const Mat2C s3 = (B + (0.5 * dz) * s2) * mm;
    const Mat2C s4 = (B + dz * s3) * m1;
    Mat2C next = B + (dz / 6.0) * (s1 + cplx(2.0) * s2 + cplx(2.0) * s3 + s4);
    const cplx det = next.det();
    const double d = std::abs(det - 1.0);
    if (!std::isfinite(d) || d > 0.1) {
      std::ostringstream os;
      os << "|det B - 1| = " << d << " at " << node_name(grid, j1, k1)
         << "; reduce the grid spacing";
      throw DetDrift(os.str());
    }
    drift = std::max(drift, d);
    if (d > tol) {
      ++renorm;
      next = (1.0 / std::sqrt(det)) * next;
    }
    return next;
  };
  auto out = sweep<Mat2C>(grid, base, order, B0, step);
  if (max_drift) *max_drift = drift;
  if (renormalized) *renormalized = renorm;
  return out;
}

SL2Field integrate_sl2(const ExprFn& theta, const ExprFn& omega, const Mat2C& B0,
                       const GridDomain& grid, BaseNode base) {
  SL2Field out;
  out.B0 = B0;
  out.base = base;
  out.B = integrate_sl2_path(theta, omega, B0, grid, base, PathOrder::RowsFirst, &out.max_drift,
                             &out.renormalized_nodes);
  const auto other = integrate_sl2_path(theta, omega, B0, grid, base, PathOrder::ColumnsFirst);
  for (std::size_t i = 0; i < other.size(); ++i)
    out.path_discrepancy =
        std::max(out.path_discrepancy, frob_norm(out.B.data()[i] - other.data()[i]));
  return out;
}

MinkVec herm_to_mink(const Mat2C& F) {
  const double a = F.a11.real(), d = F.a22.real();
  return {0.5 * (a + d), 0.5 * (a - d), F.a12.real(), F.a12.imag()};
}

Mat2C mink_to_herm(const MinkVec& x) {
  const cplx b(x.x2, x.x3);
  return {x.x0 + x.x1, b, std::conj(b), x.x0 - x.x1};
}

SurfaceMesh H3Mesh::as_surface() const { return {grid, X, {}}; }

H3Mesh immerse_h3(const SL2Field& field, const GridDomain& grid) {
  H3Mesh m;
  m.grid = grid;
  m.F = field.B.map([](const Mat2C& B) { return B * B.adjoint(); });
  m.X = m.F.map(herm_to_mink);
  m.min_x0 = INFINITY;
  for (std::size_t i = 0; i < m.F.size(); ++i) {
    const Mat2C& F = m.F.data()[i];
    m.max_hermiticity_defect = std::max(m.max_hermiticity_defect, frob_norm(F - F.adjoint()));
    m.max_det_defect = std::max(m.max_det_defect, std::abs(F.det() - 1.0));
    m.min_x0 = std::min(m.min_x0, m.X.data()[i].x0);
  }
  return m;
}

H3Report check_h3_flat(const H3Mesh& mesh, const GridField<cplx>* theta,
                       const GridField<cplx>* omega) {
  const GridDomain& grid = mesh.grid;
  const SurfaceMesh surf = mesh.as_surface();
  const auto first = first_forms(surf);
  H3Report r;
  r.regularity_margin = INFINITY;
  std::size_t wj = 0, wk = 0;
  auto consider = [&](double m, std::size_t j, std::size_t k) {
    if (m < r.regularity_margin) {
      r.regularity_margin = m;
      wj = j;
      wk = k;
    }
  };
  if (theta && omega) {
    r.margin_from_coefficients = true;
    for (std::size_t k = 0; k < grid.ny; ++k)
      for (std::size_t j = 0; j < grid.nx; ++j)
        consider(std::abs(std::abs((*theta)(j, k)) - std::abs((*omega)(j, k))), j, k);
  } else {
    for (std::size_t k = 0; k < grid.ny; ++k)
      for (std::size_t j = 0; j < grid.nx; ++j)
        consider(std::sqrt(std::max(0.0, min_eigenvalue(first(j, k)))), j, k);
  }
  if (!(r.regularity_margin >= tolerances().regular)) {
    std::ostringstream os;
    os << "regularity margin " << r.regularity_margin << " at " << node_name(grid, wj, wk)
       << (r.margin_from_coefficients ? " (|theta| = |omega|)" : " (dF drops rank)");
    throw NotImmersed(os.str());
  }
  const auto K = brioschi_curvature(grid, first);
  for (std::size_t k = 1; k + 1 < grid.ny; ++k)
    for (std::size_t j = 1; j + 1 < grid.nx; ++j)
      r.max_abs_K = std::max(r.max_abs_K, std::abs(K(j, k)));
  return r;
}

std::array<double, 3> poincare_ball(const MinkVec& x) {
  const double s = 1.0 / (1.0 + x.x0);
  return {x.x1 * s, x.x2 * s, x.x3 * s};
}

}  // namespace spinflat
