#include "spinflat/surface.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinflat/errors.hpp"
#include "spinflat/tolerances.hpp"

namespace spinflat {

namespace {

std::string at_node(const GridDomain& grid, std::size_t j, std::size_t k) {
  std::ostringstream os;
  os << "at node (" << j << ", " << k << "), (x, y) = (" << grid.x(j) << ", " << grid.y(k)
     << ")";
  return os.str();
}

double det4(const MinkVec& a, const MinkVec& b, const MinkVec& c, const MinkVec& d) {
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r) m.row(r) << a[r], b[r], c[r], d[r];
  return m.determinant();
}

// Removes the components along an orthonormal spacelike pair.
MinkVec drop_tangent(const MinkVec& v, const MinkVec& e2, const MinkVec& e3) {
  return v - mink_dot(v, e2) * e2 - mink_dot(v, e3) * e3;
}

NormalFrame normal_frame(const MinkVec& fx, const MinkVec& fy, const GridDomain& grid,
                         std::size_t j, std::size_t k) {
  NormalFrame n;
  n.e2 = fx / std::sqrt(mink_dot(fx, fx));
  const MinkVec w = fy - mink_dot(fy, n.e2) * n.e2;
  n.e3 = w / std::sqrt(mink_dot(w, w));

  const MinkVec t = drop_tangent(MinkVec{1, 0, 0, 0}, n.e2, n.e3);
  n.e0 = t / std::sqrt(-mink_dot(t, t));

  double best = -1;
  for (int c = 1; c < 4; ++c) {
    MinkVec b;
    b[c] = 1;
    MinkVec p = drop_tangent(b, n.e2, n.e3);
    p += mink_dot(p, n.e0) * n.e0;
    const double q = mink_dot(p, p);
    if (q > best) {
      best = q;
      n.e1 = p;
    }
  }
  if (!(best > tolerances().spacelike))
    throw DegenerateNormal("normal plane is degenerate " + at_node(grid, j, k));
  n.e1 = n.e1 / std::sqrt(best);
  if (det4(n.e0, n.e1, n.e2, n.e3) < 0) n.e1 = -n.e1;
  return n;
}

// Orthonormal tangent basis in coordinates: e2 = t00 dx, e3 = t10 dx + t11 dy.
struct TangentBasis {
  double t00, t10, t11;
};

TangentBasis tangent_basis(const FirstForm& I) {
  const double se = std::sqrt(I.E);
  const double s = std::sqrt(I.det() / I.E);
  return {1.0 / se, -I.F / (I.E * s), 1.0 / s};
}

// Symmetric 2x2 form (xx, xy, yy) in the orthonormal tangent basis.
std::array<double, 3> to_orthonormal(const std::array<double, 3>& b, const TangentBasis& t) {
  const double s22 = t.t00 * t.t00 * b[0];
  const double s23 = t.t00 * (t.t10 * b[0] + t.t11 * b[1]);
  const double s33 = t.t10 * t.t10 * b[0] + 2 * t.t10 * t.t11 * b[1] + t.t11 * t.t11 * b[2];
  return {s22, s23, s33};
}

template <typename Fn>
void for_interior(const GridDomain& grid, Fn&& fn) {
  for (std::size_t k = 1; k + 1 < grid.ny; ++k)
    for (std::size_t j = 1; j + 1 < grid.nx; ++j) fn(j, k);
}

}  // namespace

double min_eigenvalue(const FirstForm& I) {
  return 0.5 * (I.E + I.G) - std::sqrt(0.25 * (I.E - I.G) * (I.E - I.G) + I.F * I.F);
}

GridField<FirstForm> first_forms(const SurfaceMesh& mesh) {
  const auto Fx = diff_x(mesh.F, mesh.grid.hx());
  const auto Fy = diff_y(mesh.F, mesh.grid.hy());
  return sample(mesh.grid, [&](std::size_t j, std::size_t k) {
    return FirstForm{mink_dot(Fx(j, k), Fx(j, k)), mink_dot(Fx(j, k), Fy(j, k)),
                     mink_dot(Fy(j, k), Fy(j, k))};
  });
}

GridField<double> brioschi_curvature(const GridDomain& grid, const GridField<FirstForm>& first) {
  const double hx = grid.hx(), hy = grid.hy();
  const auto E = first.map([](const FirstForm& I) { return I.E; });
  const auto F = first.map([](const FirstForm& I) { return I.F; });
  const auto G = first.map([](const FirstForm& I) { return I.G; });
  const auto Eu = diff_x(E, hx), Ev = diff_y(E, hy), Evv = diff_yy(E, hy);
  const auto Fu = diff_x(F, hx), Fv = diff_y(F, hy), Fuv = diff_xy(F, hx, hy);
  const auto Gu = diff_x(G, hx), Gv = diff_y(G, hy), Guu = diff_xx(G, hx);
  return sample(grid, [&](std::size_t j, std::size_t k) {
    const FirstForm& I = first(j, k);
    const double det = I.det();
    const double a11 = -0.5 * Evv(j, k) + Fuv(j, k) - 0.5 * Guu(j, k);
    Eigen::Matrix3d m1, m2;
    m1 << a11, 0.5 * Eu(j, k), Fu(j, k) - 0.5 * Ev(j, k),  //
        Fv(j, k) - 0.5 * Gu(j, k), I.E, I.F,              //
        0.5 * Gv(j, k), I.F, I.G;
    m2 << 0, 0.5 * Ev(j, k), 0.5 * Gu(j, k),  //
        0.5 * Ev(j, k), I.E, I.F,             //
        0.5 * Gu(j, k), I.F, I.G;
    return (m1.determinant() - m2.determinant()) / (det * det);
  });
}

FormsField fundamental_forms(const SurfaceMesh& mesh) {
  const GridDomain& grid = mesh.grid;
  grid.validate();
  if (mesh.F.nx() != grid.nx || mesh.F.ny() != grid.ny)
    throw InvalidGrid("mesh values do not match the grid");
  const double hx = grid.hx(), hy = grid.hy();
  FormsField out;
  out.Fx = diff_x(mesh.F, hx);
  out.Fy = diff_y(mesh.F, hy);
  const auto Fxx = diff_xx(mesh.F, hx);
  const auto Fyy = diff_yy(mesh.F, hy);
  const auto Fxy = diff_xy(mesh.F, hx, hy);
  out.first = GridField<FirstForm>(grid);
  out.frame = GridField<NormalFrame>(grid);
  out.second = GridField<SecondForm>(grid);
  const double tol = tolerances().spacelike;
  for (std::size_t k = 0; k < grid.ny; ++k)
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const MinkVec& fx = out.Fx(j, k);
      const MinkVec& fy = out.Fy(j, k);
      FirstForm I{mink_dot(fx, fx), mink_dot(fx, fy), mink_dot(fy, fy)};
      const double lmin = min_eigenvalue(I);
      if (!(lmin >= tol)) {
        std::ostringstream os;
        os << "induced metric is not positive definite (min eigenvalue " << lmin << ") "
           << at_node(grid, j, k);
        throw NotSpacelike(os.str());
      }
      out.first(j, k) = I;
      const NormalFrame n = normal_frame(fx, fy, grid, j, k);
      out.frame(j, k) = n;
      const MinkVec d[3] = {Fxx(j, k), Fxy(j, k), Fyy(j, k)};
      SecondForm& II = out.second(j, k);
      for (int c = 0; c < 3; ++c) {
        II.b0[c] = mink_dot(d[c], n.e0);
        II.b1[c] = mink_dot(d[c], n.e1);
      }
    }
  return out;
}

CurvatureField curvatures(const SurfaceMesh& mesh, const FormsField& forms) {
  const GridDomain& grid = mesh.grid;
  CurvatureField out{GridField<double>(grid), GridField<double>(grid), GridField<double>(grid),
                     GridField<double>(grid), GridField<double>(grid), GridField<double>(grid)};

  out.K_intrinsic = brioschi_curvature(grid, forms.first);

  for (std::size_t k = 0; k < grid.ny; ++k)
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const FirstForm& I = forms.first(j, k);
      const SecondForm& II = forms.second(j, k);
      const double det = I.det();

      // <B_ij, B_kl> with B_ij = -b0 e0 + b1 e1.
      auto dot = [&](int a, int b) { return -II.b0[a] * II.b0[b] + II.b1[a] * II.b1[b]; };
      out.K(j, k) = (dot(0, 2) - dot(1, 1)) / det;

      // Hvec = (1/2) g^{ij} B_ij.
      const double gxx = I.G / det, gxy = -I.F / det, gyy = I.E / det;
      auto trace = [&](const std::array<double, 3>& b) {
        return 0.5 * (gxx * b[0] + 2 * gxy * b[1] + gyy * b[2]);
      };
      // <Hvec, e0> = trace(b0) because <-b0 e0, e0> = b0.
      out.h0(j, k) = -trace(II.b0);
      out.h1(j, k) = trace(II.b1);
      out.H2(j, k) = out.h1(j, k) * out.h1(j, k) - out.h0(j, k) * out.h0(j, k);

      // Shape operators of e0, e1 in the orthonormal tangent basis; K_N is
      // the (e3, e2) entry of [S0, S1].
      const TangentBasis t = tangent_basis(I);
      const auto s0 = to_orthonormal(II.b0, t);
      const auto s1 = to_orthonormal(II.b1, t);
      const double c32 = s0[1] * s1[0] + s0[2] * s1[1] - (s1[1] * s0[0] + s1[2] * s0[1]);
      out.K_N(j, k) = c32;

    }
  return out;
}

CurvatureField curvatures(const SurfaceMesh& mesh) {
  return curvatures(mesh, fundamental_forms(mesh));
}

GridField<Bivector> gauss_map(const FormsField& forms) {
  return forms.frame.map([](const NormalFrame& n) { return gauss_from_frame(n.e2, n.e3); });
}

GridField<Bivector> gauss_map(const SurfaceMesh& mesh) {
  return gauss_map(fundamental_forms(mesh));
}

CurvatureIdentityReport check_curvature_identity(const SurfaceMesh& mesh, const FormsField& forms,
                      const CurvatureField& curv, const GridField<Bivector>& G) {
  const GridDomain& grid = mesh.grid;
  const auto Gx = diff_x(G, grid.hx());
  const auto Gy = diff_y(G, grid.hy());
  CurvatureIdentityReport out;
  out.lhs = GridField<cplx>(grid);
  for (std::size_t k = 0; k < grid.ny; ++k)
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const Bivector& p = G(j, k);
      // Difference quotients leave T_G Q at O(h^2); project back first.
      const Bivector u = Gx(j, k) - h_form(Gx(j, k), p) * p;
      const Bivector v = Gy(j, k) - h_form(Gy(j, k), p) * p;
      out.lhs(j, k) = area_form(p, u, v) / std::sqrt(forms.first(j, k).det());
    }
  for_interior(grid, [&](std::size_t j, std::size_t k) {
    const cplx rhs(curv.K(j, k), curv.K_N(j, k));
    const double r = std::abs(out.lhs(j, k) - rhs);
    out.max_abs_lhs = std::max(out.max_abs_lhs, std::abs(out.lhs(j, k)));
    out.max_abs_rhs = std::max(out.max_abs_rhs, std::abs(rhs));
    if (r > out.max_residual) {
      out.max_residual = r;
      out.node_j = j;
      out.node_k = k;
    }
  });
  return out;
}

CurvatureIdentityReport check_curvature_identity(const SurfaceMesh& mesh) {
  const FormsField forms = fundamental_forms(mesh);
  return check_curvature_identity(mesh, forms, curvatures(mesh, forms), gauss_map(forms));
}

ThirdFormReport check_third_form(const SurfaceMesh& mesh, const GridField<Bivector>& G,
                      const GridField<cplx>& f1, const GridField<cplx>& f2) {
  const GridDomain& grid = mesh.grid;
  const auto Gx = diff_x(G, grid.hx());
  const auto Gy = diff_y(G, grid.hy());
  const cplx i(0, 1);
  ThirdFormReport out;
  out.value = GridField<cplx>(grid);
  for (std::size_t k = 0; k < grid.ny; ++k)
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const Bivector dz = 0.5 * (Gx(j, k) - i * Gy(j, k));
      out.value(j, k) = h_form(dz, dz);
    }
  for_interior(grid, [&](std::size_t j, std::size_t k) {
    const Bivector dzb = 0.5 * (Gx(j, k) + i * Gy(j, k));
    const cplx target = 4.0 * (f1(j, k) * f1(j, k) + f2(j, k) * f2(j, k));
    const double r = std::abs(out.value(j, k) - target);
    out.max_residual = std::max(out.max_residual, r);
    out.max_relative = std::max(out.max_relative, r / std::max(1.0, 0.25 * std::abs(target)));
    out.max_antiholomorphic = std::max(out.max_antiholomorphic, std::abs(h_form(dzb, dzb)));
  });
  return out;
}

double trapezoid_integral(const GridDomain& grid, const GridField<double>& value) {
  double sum = 0;
  for (std::size_t k = 0; k < grid.ny; ++k) {
    const double wy = (k == 0 || k + 1 == grid.ny) ? 0.5 : 1.0;
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const double wx = (j == 0 || j + 1 == grid.nx) ? 0.5 : 1.0;
      sum += wx * wy * value(j, k);
    }
  }
  return sum * grid.hx() * grid.hy();
}

IntegralReport integral_check(const SurfaceMesh& mesh, const FormsField& forms,
                              const CurvatureField& curv) {
  const GridDomain& grid = mesh.grid;
  const auto dA = forms.first.map([](const FirstForm& I) { return std::sqrt(I.det()); });
  GridField<double> k_dA(grid), kn_dA(grid);
  for (std::size_t i = 0; i < dA.size(); ++i) {
    k_dA.data()[i] = curv.K.data()[i] * dA.data()[i];
    kn_dA.data()[i] = curv.K_N.data()[i] * dA.data()[i];
  }
  return {trapezoid_integral(grid, k_dA), trapezoid_integral(grid, kn_dA),
          trapezoid_integral(grid, dA)};
}

GeometryReport analyze_geometry(const SurfaceMesh& mesh) {
  GeometryReport r;
  r.forms = fundamental_forms(mesh);
  r.curv = curvatures(mesh, r.forms);
  r.gauss = gauss_map(r.forms);
  r.curvature_identity = check_curvature_identity(mesh, r.forms, r.curv, r.gauss);
  r.integrals = integral_check(mesh, r.forms, r.curv);
  r.min_gram_eigenvalue = INFINITY;
  for_interior(mesh.grid, [&](std::size_t j, std::size_t k) {
    const FirstForm& I = r.forms.first(j, k);
    r.min_gram_eigenvalue = std::min(r.min_gram_eigenvalue, min_eigenvalue(I));
    r.max_abs_K = std::max(r.max_abs_K, std::abs(r.curv.K(j, k)));
    r.max_abs_K_N = std::max(r.max_abs_K_N, std::abs(r.curv.K_N(j, k)));
    r.max_abs_K_intrinsic = std::max(r.max_abs_K_intrinsic, std::abs(r.curv.K_intrinsic(j, k)));
    r.max_K_consistency =
        std::max(r.max_K_consistency, std::abs(r.curv.K(j, k) - r.curv.K_intrinsic(j, k)));
    r.max_abs_H2 = std::max(r.max_abs_H2, std::abs(r.curv.H2(j, k)));
    const Bivector& G = r.gauss(j, k);
    r.max_gauss_norm_defect = std::max(r.max_gauss_norm_defect, std::abs(h_form(G, G) - 1.0));
  });
  return r;
}

}  // namespace spinflat
