#include "spinflat/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinflat/errors.hpp"
#include "spinflat/tolerances.hpp"

namespace spinflat {

BaseNode base_near_origin(const GridDomain& grid) {
  auto nearest = [](double lo, double h, std::size_t n) {
    const double t = std::round(-lo / h);
    return static_cast<std::size_t>(std::clamp(t, 0.0, static_cast<double>(n - 1)));
  };
  return {nearest(grid.x_min, grid.hx(), grid.nx), nearest(grid.y_min, grid.hy(), grid.ny)};
}

using detail::node_name;
using detail::sweep;

ConnectionForm ConnectionForm::from_functions(Coefficients f12) {
  return ConnectionForm(std::move(f12));
}

ConnectionForm ConnectionForm::from_exprs(const ExprFn& f1, const ExprFn& f2) {
  return ConnectionForm([f1, f2](cplx z) { return std::pair<cplx, cplx>{f1(z), f2(z)}; });
}

ConnectionForm ConnectionForm::from_psi(const ExprFn& psi) {
  return ConnectionForm([psi](cplx z) {
    const cplx p = psi(z);
    return std::pair<cplx, cplx>{std::cos(p), std::sin(p)};
  });
}

CQuat ConnectionForm::coefficient(cplx z) const {
  const auto [a, b] = f12_(z);
  return {0.0, 0.0, a, b};
}

GridField<SpinElement> integrate_spin_path(const ConnectionForm& conn, const SpinElement& g0,
                                           const GridDomain& grid, BaseNode base,
                                           PathOrder order, double* max_drift,
                                           std::size_t* renormalized) {
  grid.validate();
  double drift = 0;
  std::size_t renorm = 0;
  const double tol = tolerances().spin;
  auto step = [&](const SpinElement& from, std::size_t j0, std::size_t k0, std::size_t j1,
                  std::size_t k1) {
    const cplx z0 = grid.z(j0, k0);
    const cplx dz = grid.z(j1, k1) - z0;
    const CQuat& g = from.value();
    const CQuat a0 = conn.coefficient(z0);
    const CQuat am = conn.coefficient(z0 + 0.5 * dz);
    const CQuat a1 = conn.coefficient(z0 + dz);
    const CQuat s1 = a0 * g;
    const CQuat s2 = am * (g + (0.5 * dz) * s1);
    const CQuat s3 = am * (g + (0.5 * dz) * s2);
    const CQuat s4 = a1 * (g + dz * s3);
    const CQuat next = g + (dz / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
    const double d = std::abs(h_form(next, next) - 1.0);
    if (!std::isfinite(d) || d > 0.1) {
      std::ostringstream os;
      os << "|H(g,g) - 1| = " << d << " at " << node_name(grid, j1, k1)
         << "; reduce the grid spacing";
      throw SpinDrift(os.str());
    }
    drift = std::max(drift, d);
    if (d > tol) ++renorm;
    return SpinElement(next);
  };
  auto out = sweep<SpinElement>(grid, base, order, g0, step);
  if (max_drift) *max_drift = drift;
  if (renormalized) *renormalized = renorm;
  return out;
}

SpinFrameField integrate_spin(const ConnectionForm& conn, const SpinElement& g0,
                              const GridDomain& grid, BaseNode base) {
  SpinFrameField out;
  out.g0 = g0;
  out.base = base;
  out.g = integrate_spin_path(conn, g0, grid, base, PathOrder::RowsFirst, &out.max_drift,
                              &out.renormalized_nodes);
  const auto other = integrate_spin_path(conn, g0, grid, base, PathOrder::ColumnsFirst);
  for (std::size_t i = 0; i < out.g.size(); ++i)
    out.path_discrepancy = std::max(
        out.path_discrepancy, coeff_norm(out.g.data()[i].value() - other.data()[i].value()));
  return out;
}

SpinFrameField integrate_spin_psi(const ExprFn& psi, const SpinElement& g0,
                                  const GridDomain& grid, BaseNode base) {
  return integrate_spin(ConnectionForm::from_psi(psi), g0, grid, base);
}

namespace {

// g / sqrt(H(g,g)). The drift left below tol_spin is harmless for g itself,
// but v -> g^{-1} v hat(g) keeps R^{1,3} only when H(g,g) is real, and the
// phase error gets multiplied by |g|^2.
CQuat unit_representative(const CQuat& g) { return g / std::sqrt(h_form(g, g)); }

}  // namespace

MinkVec xi_value(const CQuat& g, double w1, double w2) {
  const CQuat u = unit_representative(g);
  return mink_extract(bar(u) * CQuat{0.0, 0.0, w1, w2} * hat(u));
}

XiField build_xi(const SpinFrameField& spin, const FrameField& frame) {
  const std::size_t nx = spin.g.nx(), ny = spin.g.ny();
  if (frame.coframe.nx() != nx || frame.coframe.ny() != ny)
    throw InvalidGrid("spin field and frame field are sampled on different grids");
  XiField out{GridField<MinkVec>(nx, ny), GridField<MinkVec>(nx, ny), 0.0};
  for (std::size_t k = 0; k < ny; ++k)
    for (std::size_t j = 0; j < nx; ++j) {
      const CQuat g = unit_representative(spin.g(j, k).value());
      const Coframe& w = frame.coframe(j, k);
      const CQuat gi = bar(g), gh = hat(g);
      const CQuat qx = gi * CQuat{0.0, 0.0, w.w1x, w.w2x} * gh;
      const CQuat qy = gi * CQuat{0.0, 0.0, w.w1y, w.w2y} * gh;
      out.max_reality_residual =
          std::max({out.max_reality_residual, mink_residual(qx), mink_residual(qy)});
      out.xi_x(j, k) = mink_extract(qx);
      out.xi_y(j, k) = mink_extract(qy);
    }
  return out;
}

double dirac_residual(cplx alpha1, cplx alpha2, cplx f1, cplx f2, double h0, double h1) {
  const CQuat lhs = CQuat{0.0, 0.0, alpha1, alpha2} * CQuat{0.0, 0.0, f1, f2};
  const CQuat rhs{cplx(0.0, -h0), h1, 0.0, 0.0};
  return coeff_norm(lhs - rhs);
}

double check_dirac_relation(const FrameField& frame, const GridField<cplx>& f1,
                            const GridField<cplx>& f2, const GridField<double>& h0,
                            const GridField<double>& h1) {
  const std::size_t n = frame.alpha1.size();
  if (f1.size() != n || f2.size() != n || h0.size() != n || h1.size() != n)
    throw InvalidGrid("Dirac check inputs are sampled on different grids");
  double worst = 0;
  for (std::size_t i = 0; i < n; ++i)
    worst = std::max(worst, dirac_residual(frame.alpha1.data()[i], frame.alpha2.data()[i],
                                           f1.data()[i], f2.data()[i], h0.data()[i],
                                           h1.data()[i]));
  return worst;
}

ClosedIntegration integrate_closed(const XiField& xi, const MinkVec& F0, const GridDomain& grid,
                                   BaseNode base, Quadrature rule) {
  grid.validate();
  if (xi.xi_x.nx() != grid.nx || xi.xi_x.ny() != grid.ny)
    throw InvalidGrid("xi field does not match the grid");
  ClosedIntegration out;

  const auto dxy = diff_x(xi.xi_y, grid.hx());
  const auto dyx = diff_y(xi.xi_x, grid.hy());
  double max_xi = 0;
  for (std::size_t k = 0; k < grid.ny; ++k)
    for (std::size_t j = 0; j < grid.nx; ++j) {
      max_xi = std::max({max_xi, euclid_norm(xi.xi_x(j, k)), euclid_norm(xi.xi_y(j, k))});
      if (grid.interior(j, k))
        out.closedness_residual =
            std::max(out.closedness_residual, euclid_norm(dxy(j, k) - dyx(j, k)));
    }
  const double h = grid.h();
  out.closedness_tolerance = tolerances().closed_factor * h * h * std::max(1.0, max_xi);
  if (!(out.closedness_residual <= out.closedness_tolerance)) {
    std::ostringstream os;
    os << "discrete closedness residual " << out.closedness_residual << " exceeds "
       << out.closedness_tolerance;
    throw NotClosed(os.str());
  }

  auto step = [&](const MinkVec& from, std::size_t j0, std::size_t k0, std::size_t j1,
                  std::size_t k1) {
    MinkVec s;
    if (k0 == k1) {
      const std::size_t m = std::min(j0, j1);
      s = segment_integral<MinkVec>([&](std::size_t i) { return xi.xi_x(i, k0); }, m, grid.nx,
                                    grid.hx(), rule);
      return j1 > j0 ? from + s : from - s;
    }
    const std::size_t m = std::min(k0, k1);
    s = segment_integral<MinkVec>([&](std::size_t i) { return xi.xi_y(j0, i); }, m, grid.ny,
                                  grid.hy(), rule);
    return k1 > k0 ? from + s : from - s;
  };
  out.mesh.grid = grid;
  out.mesh.F = sweep<MinkVec>(grid, base, PathOrder::RowsFirst, F0, step);
  const auto other = sweep<MinkVec>(grid, base, PathOrder::ColumnsFirst, F0, step);
  for (std::size_t i = 0; i < other.size(); ++i)
    out.path_discrepancy =
        std::max(out.path_discrepancy, euclid_norm(out.mesh.F.data()[i] - other.data()[i]));
  return out;
}

std::array<double, 4> check_maximal_holomorphy(const SurfaceMesh& mesh) {
  const GridDomain& grid = mesh.grid;
  std::array<double, 4> out{};
  for (int c = 0; c < 4; ++c) {
    const auto Fc = mesh.F.map([c](const MinkVec& v) { return v[c]; });
    const auto fx = diff_x(Fc, grid.hx());
    const auto fy = diff_y(Fc, grid.hy());
    GridField<cplx> psi(grid);
    for (std::size_t i = 0; i < psi.size(); ++i)
      psi.data()[i] = cplx(fx.data()[i], -fy.data()[i]);
    out[c] = check_holomorphy(psi, grid);
  }
  return out;
}

}  // namespace spinflat
