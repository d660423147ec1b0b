#pragma once

#include <map>
#include <string>

namespace spinflat {

// Numerical thresholds shared by every module. Values marked "h-scaled" are
// quoted at the reference spacing h = 0.01 and relaxed by (h / 0.01)^2 on
// coarser grids (never tightened on finer ones); see `scaled`.
struct Tolerances {
  double null = 1e-12;        // |H(q,q)| below this: q is not invertible
  double real = 1e-9;         // off-subspace residual allowed by mink_extract
  double spin = 1e-9;         // |H(g,g) - 1| accepted without renormalization
  double frame = 1e-8;        // orthonormality of frames fed to the Gauss map
  double degen = 1e-10;       // |f1^2 + f2^2| below this: degenerate osculating space
  double indep = 1e-6;        // min |det| of the (alpha1, alpha2) frame
  double commute = 1e-4;      // h-scaled: max |[alpha1, alpha2]|
  double holo = 1e-3;         // h-scaled, relative: Cauchy-Riemann residual of inputs
  double tangency = 1e-6;     // |H(p,u)| above this triggers a tangency warning
  double closed_factor = 10;  // closedness residual <= factor * h^2 * max(1, |xi|)
  double path_spin = 1e-8;    // spin/SL2 transposed-path discrepancy
  double path_f_factor = 10;  // F transposed-path discrepancy <= factor * h^2
  double dirac = 1e-12;       // Dirac relation residual (relative to 1 + |h0| + |h1|)
  double spacelike = 1e-6;    // min eigenvalue of the induced Gram matrix
  double flat = 1e-3;         // max |K|, |K_N| for flat runs at h = 0.01
  double curvature_identity = 5e-3;  // h-scaled: |G*omega_Q / omega_M - (K + i K_N)|
  double third_form = 1e-3;   // h-scaled, relative to max(1, |f1^2 + f2^2|)
  double geom = 1e-3;         // h-scaled: Gauss map / curvature cross-checks
  double align = 1e-6;        // max deviation after Lorentz alignment
  double h3_det = 1e-8;       // |det F - 1| on H^3 meshes
  double h3_herm = 1e-10;     // hermiticity defect of F
  double regular = 1e-6;      // regularity margin below this: not immersed
  double h3_ref = 1e-8;       // deviation of an H^3 run from a supplied closed form
  double integral = 1e-2;     // curvature integrals against expected values
  bool escalate_warnings = false;

  // h-scaling factor max(1, (h / 0.01)^2).
  static double h_factor(double h);

  // Flat name -> value view, used by the CLI (--tol-NAME) and reports.
  std::map<std::string, double> as_map() const;
  // Sets a value by name; returns false when the name is unknown.
  bool set(const std::string& name, double value);
};

// Process-wide tolerances used by the low-level algebra (tol_null, tol_real,
// tol_spin). Set once at startup, before any concurrent work.
const Tolerances& tolerances();
void set_tolerances(const Tolerances& t);

// Non-fatal diagnostics (Q membership, tangency). When
// `escalate_warnings` is set, `warn` throws spinflat::Error instead.
void warn(const std::string& category, const std::string& message);
std::size_t warning_count();
void reset_warnings();

}  // namespace spinflat
