#include "spinflat/holo.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "spinflat/errors.hpp"
#include "spinflat/tolerances.hpp"

namespace spinflat {

namespace {

constexpr cplx kI{0.0, 1.0};

double frame_det(cplx a1, cplx a2) { return a1.real() * a2.imag() - a2.real() * a1.imag(); }

}  // namespace

Alpha eval_alpha(cplx f1, cplx f2, double h0, double h1) {
  const cplx d = f1 * f1 + f2 * f2;
  if (std::abs(d) < tolerances().degen) {
    std::ostringstream os;
    os << "f1^2 + f2^2 = " << d << " (degenerate osculating space)";
    throw DegenerateOsculating(os.str());
  }
  return {(kI * h0 * f1 + h1 * f2) / d, (kI * h0 * f2 - h1 * f1) / d};
}

Alpha eval_alpha_psi(cplx psi, double h0, double h1) {
  const cplx c = std::cos(psi);
  const cplx s = std::sin(psi);
  return {kI * h0 * c + h1 * s, kI * h0 * s - h1 * c};
}

Coframe dual_coframe(cplx alpha1, cplx alpha2) {
  const double det = frame_det(alpha1, alpha2);
  if (!(std::abs(det) >= tolerances().indep)) {
    std::ostringstream os;
    os << "alpha1 = " << alpha1 << " and alpha2 = " << alpha2 << " are not independent (det "
       << det << ")";
    throw FrameDegenerate(os.str());
  }
  // inverse of [[a, b], [c, d]] with a = Re a1, b = Re a2, c = Im a1, d = Im a2
  return {alpha2.imag() / det, -alpha2.real() / det, -alpha1.imag() / det,
          alpha1.real() / det};
}

double check_holomorphy(const GridField<cplx>& field, const GridDomain& grid) {
  const double hx = grid.hx(), hy = grid.hy();
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < grid.ny; ++k) {
    for (std::size_t j = 1; j + 1 < grid.nx; ++j) {
      const cplx fx = (field(j + 1, k) - field(j - 1, k)) / (2.0 * hx);
      const cplx fy = (field(j, k + 1) - field(j, k - 1)) / (2.0 * hy);
      worst = std::max(worst, std::abs(fx + kI * fy));
    }
  }
  return worst;
}

FrameField make_frame(const GridField<cplx>& alpha1, const GridField<cplx>& alpha2) {
  FrameField out{alpha1, alpha2, GridField<Coframe>(alpha1.nx(), alpha1.ny())};
  const double tol = tolerances().indep;
  for (std::size_t n = 0; n < alpha1.size(); ++n) {
    const cplx a1 = alpha1.data()[n], a2 = alpha2.data()[n];
    if (std::abs(frame_det(a1, a2)) >= tol) out.coframe.data()[n] = dual_coframe(a1, a2);
  }
  return out;
}

FrameField make_frame(const GridDomain& grid, const ExprFn& f1, const ExprFn& f2,
                      const ExprFn& h0, const ExprFn& h1) {
  GridField<cplx> a1(grid), a2(grid);
  for (std::size_t k = 0; k < grid.ny; ++k) {
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const cplx z = grid.z(j, k);
      const Alpha a = eval_alpha(f1(z), f2(z), h0.real(z.real(), z.imag()),
                                 h1.real(z.real(), z.imag()));
      a1(j, k) = a.alpha1;
      a2(j, k) = a.alpha2;
    }
  }
  return make_frame(a1, a2);
}

FrameField make_frame_psi(const GridDomain& grid, const ExprFn& psi, const ExprFn& h0,
                          const ExprFn& h1) {
  GridField<cplx> a1(grid), a2(grid);
  for (std::size_t k = 0; k < grid.ny; ++k) {
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const cplx z = grid.z(j, k);
      const Alpha a = eval_alpha_psi(psi(z), h0.real(z.real(), z.imag()),
                                     h1.real(z.real(), z.imag()));
      a1(j, k) = a.alpha1;
      a2(j, k) = a.alpha2;
    }
  }
  return make_frame(a1, a2);
}

FrameReport check_frame(const FrameField& frame, const GridDomain& grid) {
  const Tolerances& tol = tolerances();
  FrameReport r;
  r.min_abs_det = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.ny; ++k) {
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const double d = std::abs(frame_det(frame.alpha1(j, k), frame.alpha2(j, k)));
      if (d < r.min_abs_det) {
        r.min_abs_det = d;
        r.det_node_j = j;
        r.det_node_k = k;
      }
    }
  }
  const double hx = grid.hx(), hy = grid.hy();
  const auto& a1 = frame.alpha1;
  const auto& a2 = frame.alpha2;
  for (std::size_t k = 1; k + 1 < grid.ny; ++k) {
    for (std::size_t j = 1; j + 1 < grid.nx; ++j) {
      auto dx = [&](const GridField<cplx>& a) {
        return fd::first4<cplx>([&](std::size_t m) { return a(m, k); }, j, grid.nx, hx);
      };
      auto dy = [&](const GridField<cplx>& a) {
        return fd::first4<cplx>([&](std::size_t m) { return a(j, m); }, k, grid.ny, hy);
      };
      const cplx a1x = dx(a1), a1y = dy(a1), a2x = dx(a2), a2y = dy(a2);
      const cplx u = a1(j, k), v = a2(j, k);
      const cplx bracket = (u.real() * a2x + u.imag() * a2y) - (v.real() * a1x + v.imag() * a1y);
      const double m = std::abs(bracket);
      if (m > r.max_commutator) {
        r.max_commutator = m;
        r.comm_node_j = j;
        r.comm_node_k = k;
      }
    }
  }
  r.commute_tolerance = tol.commute * Tolerances::h_factor(grid.h());
  r.pass = r.min_abs_det >= tol.indep && r.max_commutator <= r.commute_tolerance;
  return r;
}

void require_frame(const FrameReport& r, const GridDomain& grid) {
  if (!(r.min_abs_det >= tolerances().indep)) {
    std::ostringstream os;
    os << "frame is degenerate at z = " << grid.z(r.det_node_j, r.det_node_k) << " (|det| "
       << r.min_abs_det << ")";
    throw FrameDegenerate(os.str());
  }
  if (!(r.max_commutator <= r.commute_tolerance)) {
    std::ostringstream os;
    os << "[alpha1, alpha2] = " << r.max_commutator << " exceeds " << r.commute_tolerance
       << " at z = " << grid.z(r.comm_node_j, r.comm_node_k);
    throw FrameNonCommuting(os.str());
  }
}

}  // namespace spinflat
