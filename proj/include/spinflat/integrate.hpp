#pragma once

// Integration of the flat connection dg g^{-1} = (f1 J + f2 K) dz, assembly of
// the Minkowski-valued 1-form xi = g^{-1} (omega1 J + omega2 K) hat(g), and its
// integration to the immersion F.
//
// Path integrals follow grid lines from a base node: first along the base
// row (both directions), then along every column; the transposed order
// (base column, then rows) is run as well and the node-wise discrepancy
// between the two is reported as the flatness / closedness diagnostic.

#include <array>
#include <functional>

#include "spinflat/detail/sweep.hpp"
#include "spinflat/expr.hpp"
#include "spinflat/holo.hpp"
#include "spinflat/mesh.hpp"
#include "spinflat/spin.hpp"

namespace spinflat {

// eta' = A(z) dz with A = f1 J + f2 K. The 1 and I components are zero by
// construction.
class ConnectionForm {
 public:
  using Coefficients = std::function<std::pair<cplx, cplx>(cplx)>;

  static ConnectionForm from_functions(Coefficients f12);
  static ConnectionForm from_exprs(const ExprFn& f1, const ExprFn& f2);
  // A = cos(psi) J + sin(psi) K
  static ConnectionForm from_psi(const ExprFn& psi);

  CQuat coefficient(cplx z) const;
  std::pair<cplx, cplx> f12(cplx z) const { return f12_(z); }

 private:
  explicit ConnectionForm(Coefficients f) : f12_(std::move(f)) {}
  Coefficients f12_;
};

struct SpinFrameField {
  GridField<SpinElement> g;
  SpinElement g0;
  BaseNode base;
  double max_drift = 0;               // max |H(g,g) - 1| before renormalization
  std::size_t renormalized_nodes = 0;
  double path_discrepancy = 0;        // max node-wise |g_rows - g_columns|
};

// Classical RK4 on every grid segment, A evaluated exactly at the segment
// midpoint. Throws SpinDrift when |H(g,g) - 1| exceeds 0.1.
SpinFrameField integrate_spin(const ConnectionForm& conn, const SpinElement& g0,
                              const GridDomain& grid, BaseNode base);
SpinFrameField integrate_spin_psi(const ExprFn& psi, const SpinElement& g0,
                                  const GridDomain& grid, BaseNode base);
// Single path order, no discrepancy computed.
GridField<SpinElement> integrate_spin_path(const ConnectionForm& conn, const SpinElement& g0,
                                           const GridDomain& grid, BaseNode base,
                                           PathOrder order, double* max_drift = nullptr,
                                           std::size_t* renormalized = nullptr);

struct XiField {
  GridField<MinkVec> xi_x, xi_y;  // xi(d/dx), xi(d/dy)
  double max_reality_residual = 0;
};

// xi(X) = g^{-1} (omega1(X) J + omega2(X) K) hat(g). Throws NotMinkowski.
XiField build_xi(const SpinFrameField& spin, const FrameField& frame);
MinkVec xi_value(const CQuat& g, double w1, double w2);

// Max node residual |(alpha1 J + alpha2 K)(f1 J + f2 K) - (-i h0 1 + h1 I)|.
double dirac_residual(cplx alpha1, cplx alpha2, cplx f1, cplx f2, double h0, double h1);
double check_dirac_relation(const FrameField& frame, const GridField<cplx>& f1,
                            const GridField<cplx>& f2, const GridField<double>& h0,
                            const GridField<double>& h1);

enum class Quadrature {
  Trapezoid,  // second order
  Cubic,      // fourth order: cubic interpolation through 4 neighbouring nodes
};

struct ClosedIntegration {
  SurfaceMesh mesh;
  double closedness_residual = 0;  // max interior |d/dx xi_y - d/dy xi_x|
  double closedness_tolerance = 0;
  double path_discrepancy = 0;     // max node-wise |F_rows - F_columns|
};

// F = F0 + integral of xi along grid paths. Throws NotClosed when the
// closedness residual exceeds closed_factor * h^2 * max(1, max|xi|).
ClosedIntegration integrate_closed(const XiField& xi, const MinkVec& F0, const GridDomain& grid,
                                   BaseNode base, Quadrature rule = Quadrature::Cubic);

// Integral from node m to m + 1 of a line of n >= 3 samples f at spacing h.
template <typename T, typename Get>
T segment_integral(Get&& f, std::size_t m, std::size_t n, double h, Quadrature rule) {
  if (rule == Quadrature::Trapezoid) return (f(m) + f(m + 1)) * (0.5 * h);
  if (n == 3) {
    if (m == 0) return (5.0 * f(0) + 8.0 * f(1) - 1.0 * f(2)) * (h / 12.0);
    return (5.0 * f(2) + 8.0 * f(1) - 1.0 * f(0)) * (h / 12.0);
  }
  if (m == 0) return (9.0 * f(0) + 19.0 * f(1) - 5.0 * f(2) + f(3)) * (h / 24.0);
  if (m + 2 == n)
    return (9.0 * f(n - 1) + 19.0 * f(n - 2) - 5.0 * f(n - 3) + f(n - 4)) * (h / 24.0);
  return (13.0 * (f(m) + f(m + 1)) - f(m - 1) - f(m + 2)) * (h / 24.0);
}

// Cauchy-Riemann residuals of dF_k/dx - i dF_k/dy for k = 0..3. These vanish
// (to O(h^2)) exactly when F is harmonic, i.e. a maximal surface in a
// conformal parameter.
std::array<double, 4> check_maximal_holomorphy(const SurfaceMesh& mesh);

}  // namespace spinflat
