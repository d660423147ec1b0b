#pragma once

// Finite-difference verifier. Everything here is recomputed from the sampled
// immersion F alone: first and second fundamental forms, Gauss and normal
// curvature, the mean curvature vector, the Gauss map into Q and the
// curvature identities relating them.
//
// Derivatives are second order (central inside, one-sided on the border).
// Maxima are taken over interior nodes only; integrals use every node.

#include <array>

#include "spinflat/grassmann.hpp"
#include "spinflat/mesh.hpp"

namespace spinflat {

struct FirstForm {
  double E = 0, F = 0, G = 0;
  double det() const { return E * G - F * F; }
};

// e0 future timelike, e1 spacelike normal, (e2, e3) the orthonormalized
// tangent frame of (dF/dx, dF/dy); det[e0 e1 e2 e3] > 0.
struct NormalFrame {
  MinkVec e0, e1, e2, e3;
};

// Normal components of the coordinate second derivatives, in the order
// (xx, xy, yy): b0 = <F_ij, e0>, b1 = <F_ij, e1>. The normal part of F_ij is
// -b0 e0 + b1 e1.
struct SecondForm {
  std::array<double, 3> b0{}, b1{};
};

struct FormsField {
  GridField<MinkVec> Fx, Fy;
  GridField<FirstForm> first;
  GridField<NormalFrame> frame;
  GridField<SecondForm> second;
};

// Throws NotSpacelike (Gram matrix min eigenvalue < tol_spacelike) and
// DegenerateNormal, naming the node.
FormsField fundamental_forms(const SurfaceMesh& mesh);

// First fundamental form only, no spacelike check.
GridField<FirstForm> first_forms(const SurfaceMesh& mesh);
// Intrinsic Gauss curvature of a first form sampled on a grid (Brioschi).
GridField<double> brioschi_curvature(const GridDomain& grid, const GridField<FirstForm>& first);
double min_eigenvalue(const FirstForm& I);

struct CurvatureField {
  GridField<double> K;            // Gauss equation
  GridField<double> K_intrinsic;  // Brioschi formula from the first form alone
  GridField<double> K_N;          // Ricci equation
  GridField<double> h0, h1;       // -<Hvec, e0>, <Hvec, e1>
  GridField<double> H2;           // <Hvec, Hvec> = h1^2 - h0^2 (frame independent)
};

CurvatureField curvatures(const SurfaceMesh& mesh, const FormsField& forms);
CurvatureField curvatures(const SurfaceMesh& mesh);

// e2 . hat(e3) per node.
GridField<Bivector> gauss_map(const FormsField& forms);
GridField<Bivector> gauss_map(const SurfaceMesh& mesh);

struct CurvatureIdentityReport {
  GridField<cplx> lhs;       // area_form(G; G_x, G_y) / sqrt(det I)
  double max_residual = 0;   // max interior |lhs - (K + i K_N)|
  double max_abs_lhs = 0;
  double max_abs_rhs = 0;
  std::size_t node_j = 0, node_k = 0;  // where max_residual is attained
};

CurvatureIdentityReport check_curvature_identity(const SurfaceMesh& mesh, const FormsField& forms,
                      const CurvatureField& curv, const GridField<Bivector>& G);
CurvatureIdentityReport check_curvature_identity(const SurfaceMesh& mesh);

struct ThirdFormReport {
  GridField<cplx> value;          // H(dG/dz, dG/dz)
  double max_residual = 0;        // max interior |value - 4 (f1^2 + f2^2)|
  double max_relative = 0;        // residual / max(1, |f1^2 + f2^2|)
  double max_antiholomorphic = 0; // max interior |H(dG/dzbar, dG/dzbar)|
};

ThirdFormReport check_third_form(const SurfaceMesh& mesh, const GridField<Bivector>& G,
                      const GridField<cplx>& f1, const GridField<cplx>& f2);

struct IntegralReport {
  double K = 0;     // integral of K dA over the chart
  double K_N = 0;   // integral of K_N dA
  double area = 0;
};

IntegralReport integral_check(const SurfaceMesh& mesh, const FormsField& forms,
                              const CurvatureField& curv);

struct GeometryReport {
  FormsField forms;
  CurvatureField curv;
  GridField<Bivector> gauss;
  CurvatureIdentityReport curvature_identity;
  IntegralReport integrals;
  // Interior maxima.
  double max_abs_K = 0, max_abs_K_N = 0, max_abs_K_intrinsic = 0;
  double max_K_consistency = 0;  // |K - K_intrinsic|
  double max_abs_H2 = 0;
  double min_gram_eigenvalue = 0;
  double max_gauss_norm_defect = 0;  // |H(G,G) - 1|
};

GeometryReport analyze_geometry(const SurfaceMesh& mesh);

// Sum over the grid of w(j,k) * value(j,k) with composite trapezoid weights.
double trapezoid_integral(const GridDomain& grid, const GridField<double>& value);

}  // namespace spinflat
