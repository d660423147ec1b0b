#pragma once

// Frame data of the flat-surface construction: the complex numbers
// alpha1, alpha2 built from (f1, f2, h0, h1) or (psi, h0, h1), read as real
// vector fields Re(alpha) d/dx + Im(alpha) d/dy, their dual coframe, and the
// well-posedness checks on them.

#include <utility>

#include "spinflat/cquat.hpp"
#include "spinflat/expr.hpp"
#include "spinflat/grid.hpp"

namespace spinflat {

struct Alpha {
  cplx alpha1, alpha2;
};

// alpha1 = (i h0 f1 + h1 f2) / (f1^2 + f2^2), alpha2 = (i h0 f2 - h1 f1) / (f1^2 + f2^2).
// Throws DegenerateOsculating when |f1^2 + f2^2| < tol_degen.
Alpha eval_alpha(cplx f1, cplx f2, double h0, double h1);

// alpha1 = i h0 cos(psi) + h1 sin(psi), alpha2 = i h0 sin(psi) - h1 cos(psi).
Alpha eval_alpha_psi(cplx psi, double h0, double h1);

// Rows of the dual coframe: omega_i(d/dx), omega_i(d/dy).
struct Coframe {
  double w1x = 0, w1y = 0, w2x = 0, w2y = 0;
};

// Inverts [[Re a1, Re a2], [Im a1, Im a2]]. Throws FrameDegenerate when
// |det| < tol_indep.
Coframe dual_coframe(cplx alpha1, cplx alpha2);

// Max over interior nodes of |df/dx + i df/dy| by central differences.
double check_holomorphy(const GridField<cplx>& field, const GridDomain& grid);

struct FrameField {
  GridField<cplx> alpha1, alpha2;
  // Zero where |det| < tol_indep.
  GridField<Coframe> coframe;
};

// Builds alpha and the coframe on every node from the Weierstrass-type data.
FrameField make_frame(const GridDomain& grid, const ExprFn& f1, const ExprFn& f2,
                      const ExprFn& h0, const ExprFn& h1);
FrameField make_frame_psi(const GridDomain& grid, const ExprFn& psi, const ExprFn& h0,
                          const ExprFn& h1);
// From given alpha fields. The coframe is left zero on nodes where the frame
// is degenerate; check_frame reports those.
FrameField make_frame(const GridField<cplx>& alpha1, const GridField<cplx>& alpha2);

struct FrameReport {
  double min_abs_det = 0;
  double max_commutator = 0;
  double commute_tolerance = 0;  // effective, after h-scaling
  // Node with the smallest |det| and node with the largest commutator.
  std::size_t det_node_j = 0, det_node_k = 0;
  std::size_t comm_node_j = 0, comm_node_k = 0;
  bool pass = false;
};

// Independence and [alpha1, alpha2] = 0 on the grid. The bracket
// (a1 . grad) a2 - (a2 . grad) a1 is evaluated by fourth-order differences on
// interior nodes. Returns the report; `require_frame` below throws instead.
FrameReport check_frame(const FrameField& frame, const GridDomain& grid);

// Throws FrameDegenerate / FrameNonCommuting naming the offending node.
void require_frame(const FrameReport& report, const GridDomain& grid);

}  // namespace spinflat
