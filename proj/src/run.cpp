#include "spinflat/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "spinflat/alignment.hpp"
#include "spinflat/errors.hpp"
#include "spinflat/expr.hpp"
#include "spinflat/holo.hpp"
#include "spinflat/mesh_io.hpp"
#include "spinflat/surface.hpp"

namespace spinflat {

using ojson = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::map<std::string, Mode>& mode_table() {
  static const std::map<std::string, Mode> t = {{"gen-flat", Mode::GenFlat},
                                                {"gen-flat-psi", Mode::GenFlatPsi},
                                                {"gen-h3", Mode::GenH3},
                                                {"analyze", Mode::Analyze},
                                                {"converge", Mode::Converge}};
  return t;
}

// ---------------------------------------------------------------------------
// Config parsing

[[noreturn]] void config_error(const std::string& msg) { throw ConfigError(msg); }

double get_number(const ojson& v, const std::string& where) {
  if (!v.is_number()) config_error(where + " must be a number");
  return v.get<double>();
}

std::size_t get_count(const ojson& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    config_error(where + " must be a non-negative integer");
  return v.get<std::size_t>();
}

std::string get_expr_source(const ojson& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return format17(v.get<double>());
  config_error(where + " must be an expression string or a number");
}

void check_keys(const ojson& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_error(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.count(k)) config_error("unknown key '" + k + "' in " + where);
}

template <std::size_t N>
std::array<double, N> get_reals(const ojson& v, const std::string& where) {
  if (!v.is_array() || v.size() != N)
    config_error(where + " must be an array of " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = get_number(v[i], where);
  return out;
}

void parse_expr_map(const ojson& obj, const std::string& where,
                    std::initializer_list<const char*> allowed,
                    std::map<std::string, std::string>& out) {
  check_keys(obj, where, allowed);
  for (const auto& [k, v] : obj.items()) {
    if (k == "align") continue;
    out[k] = get_expr_source(v, where + "." + k);
    try {
      ExprFn::parse(out[k]);
    } catch (const ExprError& e) {
      std::ostringstream os;
      os << where << "." << k << ": " << e.what();
      if (e.position() != std::string::npos) os << " (at character " << e.position() << ")";
      config_error(os.str());
    }
  }
}

void require(const std::map<std::string, std::string>& m, const std::string& where,
             std::initializer_list<const char*> keys) {
  for (const char* k : keys)
    if (!m.count(k)) config_error(where + " requires '" + k + "'");
}

std::string normalize_tol_name(std::string s) {
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

ExprFn expr(const RunConfig& c, const std::string& name) { return ExprFn::parse(c.data.at(name)); }

// ---------------------------------------------------------------------------
// Check bookkeeping

struct StopPipeline {};

class Checks {
 public:
  explicit Checks(std::vector<std::string> planned) : planned_(std::move(planned)) {}

  void begin(const std::string& name) { current_ = name; }

  bool upper(const std::string& name, double value, double tol, ojson extra = ojson::object(),
             bool hard = false) {
    const bool pass = value <= tol;
    record(name, value, tol, pass, "<=", std::move(extra));
    if (!pass && hard) throw StopPipeline{};
    return pass;
  }

  bool lower(const std::string& name, double value, double tol, ojson extra = ojson::object(),
             bool hard = false) {
    const bool pass = value >= tol;
    record(name, value, tol, pass, ">=", std::move(extra));
    if (!pass && hard) throw StopPipeline{};
    return pass;
  }

  void flag(const std::string& name, bool pass, ojson extra = ojson::object()) {
    ojson e;
    e["name"] = name;
    e["status"] = pass ? "pass" : "fail";
    for (auto& [k, v] : extra.items()) e[k] = v;
    store(name, std::move(e), pass);
  }

  void error(const Error& err) {
    ojson e;
    e["name"] = current_;
    e["status"] = "fail";
    e["error"] = err.kind();
    e["message"] = err.what();
    store(current_, std::move(e), false);
  }

  bool failed() const { return !first_failure_.empty(); }
  const std::string& first_failure() const { return first_failure_; }

  ojson finish() const {
    ojson out = ojson::array();
    for (const auto& n : planned_) {
      auto it = done_.find(n);
      if (it != done_.end()) {
        out.push_back(it->second);
      } else {
        ojson e;
        e["name"] = n;
        e["status"] = "skipped";
        out.push_back(e);
      }
    }
    return out;
  }

 private:
  void record(const std::string& name, double value, double tol, bool pass, const char* rel,
              ojson extra) {
    ojson e;
    e["name"] = name;
    e["status"] = pass ? "pass" : "fail";
    e["value"] = value;
    e["tolerance"] = tol;
    e["relation"] = rel;
    for (auto& [k, v] : extra.items()) e[k] = v;
    store(name, std::move(e), pass);
  }

  void store(const std::string& name, ojson e, bool pass) {
    if (std::find(planned_.begin(), planned_.end(), name) == planned_.end())
      planned_.push_back(name);
    if (done_.count(name)) return;  // first verdict wins
    done_[name] = std::move(e);
    if (!pass && first_failure_.empty()) first_failure_ = name;
  }

  std::vector<std::string> planned_;
  std::map<std::string, ojson> done_;
  std::string current_ = "setup";
  std::string first_failure_;
};

// Runs `body`, turning library errors into a failure of the current check.
template <typename Fn>
void guarded(Checks& ck, Fn&& body) {
  try {
    body();
  } catch (const StopPipeline&) {
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    ck.error(e);
  }
}

class ToleranceScope {
 public:
  explicit ToleranceScope(const Tolerances& t) : saved_(tolerances()) { set_tolerances(t); }
  ~ToleranceScope() { set_tolerances(saved_); }

 private:
  Tolerances saved_;
};

// ---------------------------------------------------------------------------
// Shared helpers

double max_abs(const GridField<cplx>& f) {
  double m = 0;
  for (const cplx& v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

// Relative Cauchy-Riemann residual of a sampled input.
double holo_residual(const GridField<cplx>& f, const GridDomain& grid) {
  return check_holomorphy(f, grid) / std::max(1.0, max_abs(f));
}

GridField<cplx> sample_expr(const GridDomain& grid, const ExprFn& e) {
  return sample(grid, [&](std::size_t j, std::size_t k) { return e(grid.z(j, k)); });
}

GridField<double> sample_real(const GridDomain& grid, const ExprFn& e) {
  return sample(grid, [&](std::size_t j, std::size_t k) { return e.real(grid.x(j), grid.y(k)); });
}

BaseNode resolve_base(const RunConfig& c, const GridDomain& grid) {
  if (c.base_node) return *c.base_node;
  if (c.base == "corner") return {0, 0};
  return base_near_origin(grid);
}

std::vector<MinkVec> sample_reference(const RunConfig& c, const GridDomain& grid) {
  std::vector<MinkVec> out(grid.size());
  if (c.reference.count("a")) {
    const ExprFn a = ExprFn::parse(c.reference.at("a"));
    const ExprFn b = ExprFn::parse(c.reference.at("b"));
    const ExprFn d = ExprFn::parse(c.reference.at("d"));
    for (std::size_t k = 0; k < grid.ny; ++k)
      for (std::size_t j = 0; j < grid.nx; ++j) {
        const double x = grid.x(j), y = grid.y(k);
        const cplx bv = b(grid.z(j, k));
        out[k * grid.nx + j] = herm_to_mink({a.real(x, y), bv, std::conj(bv), d.real(x, y)});
      }
    return out;
  }
  std::array<ExprFn, 4> e;
  for (int i = 0; i < 4; ++i) e[i] = ExprFn::parse(c.reference.at("x" + std::to_string(i)));
  for (std::size_t k = 0; k < grid.ny; ++k)
    for (std::size_t j = 0; j < grid.nx; ++j)
      for (int i = 0; i < 4; ++i) out[k * grid.nx + j][i] = e[i].real(grid.x(j), grid.y(k));
  return out;
}

// Compares mesh values with the configured closed form, either directly or
// after the best-fit Lorentz motion.
void reference_check(const RunConfig& c, const std::string& name, const GridField<MinkVec>& F,
                     const GridDomain& grid, double tol, bool allow_align, Checks& ck) {
  ck.begin(name);
  const std::vector<MinkVec> ref = sample_reference(c, grid);
  if (allow_align && c.align) {
    const Alignment a = align_lorentz(ref, F.data());
    ojson extra;
    extra["aligned"] = true;
    extra["max_deviation"] = a.max_deviation;
    extra["lorentz_defect"] = a.lorentz_defect;
    extra["fit_rank"] = a.rank;
    if (!a.determined()) {
      extra["message"] = "reference points span a degenerate affine set; the motion is not determined";
      ck.flag(name, false, extra);
      return;
    }
    ck.upper(name, std::max(a.max_deviation, a.lorentz_defect), tol, extra);
    return;
  }
  double dev = 0;
  for (std::size_t i = 0; i < ref.size(); ++i)
    dev = std::max(dev, euclid_norm(ref[i] - F.data()[i]));
  ojson extra;
  extra["aligned"] = false;
  ck.upper(name, dev, tol, extra);
}

ojson grid_json(const GridDomain& g) {
  ojson j;
  j["x"] = {g.x_min, g.x_max};
  j["y"] = {g.y_min, g.y_max};
  j["nx"] = g.nx;
  j["ny"] = g.ny;
  j["h"] = g.h();
  return j;
}

ojson real_field_json(const GridField<double>& f) {
  ojson a = ojson::array();
  for (double v : f.data()) a.push_back(v);
  return a;
}

ojson cplx_field_json(const GridField<cplx>& f) {
  ojson a = ojson::array();
  for (const cplx& v : f.data()) a.push_back({v.real(), v.imag()});
  return a;
}

ojson bivector_field_json(const GridField<Bivector>& f) {
  ojson a = ojson::array();
  for (const Bivector& b : f.data()) a.push_back(to_array(b));
  return a;
}

void geometry_diagnostics(const GeometryReport& geo, const SurfaceMesh& mesh, bool dump,
                          ojson& diag) {
  ojson g;
  g["max_abs_K"] = geo.max_abs_K;
  g["max_abs_K_N"] = geo.max_abs_K_N;
  g["max_abs_K_intrinsic"] = geo.max_abs_K_intrinsic;
  g["max_K_consistency"] = geo.max_K_consistency;
  g["max_abs_mean_curvature_norm"] = geo.max_abs_H2;
  g["min_gram_eigenvalue"] = geo.min_gram_eigenvalue;
  g["max_gauss_norm_defect"] = geo.max_gauss_norm_defect;
  g["curvature_identity_max_abs_lhs"] = geo.curvature_identity.max_abs_lhs;
  g["curvature_identity_max_abs_rhs"] = geo.curvature_identity.max_abs_rhs;
  g["integral_K"] = geo.integrals.K;
  g["integral_K_N"] = geo.integrals.K_N;
  g["area"] = geo.integrals.area;
  const auto mh = check_maximal_holomorphy(mesh);
  g["maximal_holomorphy_residuals"] = {mh[0], mh[1], mh[2], mh[3]};
  diag["geometry"] = g;
  if (dump) {
    ojson n;
    n["K"] = real_field_json(geo.curv.K);
    n["K_intrinsic"] = real_field_json(geo.curv.K_intrinsic);
    n["K_N"] = real_field_json(geo.curv.K_N);
    n["h0"] = real_field_json(geo.curv.h0);
    n["h1"] = real_field_json(geo.curv.h1);
    n["curvature_identity_lhs"] = cplx_field_json(geo.curvature_identity.lhs);
    n["gauss_map"] = bivector_field_json(geo.gauss);
    diag["nodes"] = n;
  }
}

// ---------------------------------------------------------------------------
// Flat surfaces in R^{1,3}

struct FlatProducts {
  std::optional<SpinFrameField> spin;
  std::optional<SurfaceMesh> mesh;
  std::map<std::string, double> metrics;
  ojson diagnostics = ojson::object();
};

std::vector<std::string> flat_checks(const RunConfig& c) {
  std::vector<std::string> v = {
      "input-holomorphy", "osculating-degeneracy", "frame-independence", "frame-commutation",
      "dirac-relation", "spin-drift", "spin-path-independence", "xi-reality", "closedness",
      "f-path-independence", "spacelike", "flat-K", "flat-K_N", "curvature-identity",
      "curvature-identity-flat-sides", "third-form", "third-form-antiholomorphic", "gauss-map"};
  if (!c.reference.empty()) v.push_back("alignment");
  return v;
}

// Conditioning of the Dirac residual: the algebra loses up to
// (|f1|^2 + |f2|^2) / |f1^2 + f2^2| relative digits near the degenerate set.
double dirac_scale(cplx f1, cplx f2, double h0, double h1) {
  const double kappa = (std::norm(f1) + std::norm(f2)) / std::abs(f1 * f1 + f2 * f2);
  return (1.0 + std::abs(h0) + std::abs(h1)) * std::max(1.0, kappa);
}

void run_flat(const RunConfig& c, Mode pipeline, const GridDomain& grid, BaseNode base, Checks& ck,
              FlatProducts& out) {
  const Tolerances& t = c.tol;
  const double h = grid.h(), hf = Tolerances::h_factor(h);
  const bool psi_mode = pipeline == Mode::GenFlatPsi;
  const ExprFn h0e = expr(c, "h0"), h1e = expr(c, "h1");
  GridField<cplx> f1, f2;
  FrameField frame;
  std::optional<ExprFn> psi, f1e, f2e;

  ck.begin("input-holomorphy");
  if (psi_mode) {
    psi = expr(c, "psi");
    const auto psiF = sample_expr(grid, *psi);
    f1 = psiF.map([](cplx p) { return std::cos(p); });
    f2 = psiF.map([](cplx p) { return std::sin(p); });
    ck.upper("input-holomorphy", holo_residual(psiF, grid), t.holo * hf);
  } else {
    f1e = expr(c, "f1");
    f2e = expr(c, "f2");
    f1 = sample_expr(grid, *f1e);
    f2 = sample_expr(grid, *f2e);
    ck.upper("input-holomorphy", std::max(holo_residual(f1, grid), holo_residual(f2, grid)),
             t.holo * hf);
  }

  ck.begin("osculating-degeneracy");
  double min_d = INFINITY;
  for (std::size_t i = 0; i < f1.size(); ++i) {
    const cplx a = f1.data()[i], b = f2.data()[i];
    min_d = std::min(min_d, std::abs(a * a + b * b));
  }
  ck.lower("osculating-degeneracy", min_d, t.degen, ojson::object(), true);

  ck.begin("frame-independence");
  frame = psi_mode ? make_frame_psi(grid, *psi, h0e, h1e) : make_frame(grid, *f1e, *f2e, h0e, h1e);
  const FrameReport fr = check_frame(frame, grid);
  ojson det_at, comm_at;
  det_at["node"] = {fr.det_node_j, fr.det_node_k};
  comm_at["node"] = {fr.comm_node_j, fr.comm_node_k};
  try {
    require_frame(fr, grid);
  } catch (const Error& e) {
    ojson& at = e.kind() == "FrameDegenerate" ? det_at : comm_at;
    at["error"] = e.kind();
    at["message"] = e.what();
  }
  ck.lower("frame-independence", fr.min_abs_det, t.indep, det_at);
  ck.upper("frame-commutation", fr.max_commutator, fr.commute_tolerance, comm_at);
  if (!fr.pass) throw StopPipeline{};

  ck.begin("dirac-relation");
  const auto h0F = sample_real(grid, h0e), h1F = sample_real(grid, h1e);
  double dirac = 0, dirac_abs = 0;
  for (std::size_t i = 0; i < f1.size(); ++i) {
    const double r = dirac_residual(frame.alpha1.data()[i], frame.alpha2.data()[i], f1.data()[i],
                                    f2.data()[i], h0F.data()[i], h1F.data()[i]);
    dirac_abs = std::max(dirac_abs, r);
    dirac = std::max(dirac, r / dirac_scale(f1.data()[i], f2.data()[i], h0F.data()[i],
                                            h1F.data()[i]));
  }
  ojson dextra;
  dextra["max_absolute"] = dirac_abs;
  ck.upper("dirac-relation", dirac, t.dirac, dextra);

  ck.begin("spin-drift");
  const ConnectionForm conn =
      psi_mode ? ConnectionForm::from_psi(*psi) : ConnectionForm::from_exprs(*f1e, *f2e);
  const SpinElement g0(cquat_from_array(c.g0));
  out.spin = integrate_spin(conn, g0, grid, base);
  const SpinFrameField& spin = *out.spin;
  const double path_len = (grid.x_max - grid.x_min) + (grid.y_max - grid.y_min);
  ojson sextra;
  sextra["renormalized_nodes"] = spin.renormalized_nodes;
  ck.upper("spin-drift", spin.max_drift, t.spin * std::max(1.0, path_len) * hf * hf, sextra);
  ck.begin("spin-path-independence");
  ck.upper("spin-path-independence", spin.path_discrepancy, t.path_spin * hf * hf);

  ck.begin("xi-reality");
  const XiField xi = build_xi(spin, frame);
  ck.upper("xi-reality", xi.max_reality_residual, t.real);

  ck.begin("closedness");
  MinkVec F0 = c.F0;
  const ClosedIntegration ci = integrate_closed(xi, F0, grid, base, c.quadrature);
  ck.upper("closedness", ci.closedness_residual, ci.closedness_tolerance);
  ck.begin("f-path-independence");
  ck.upper("f-path-independence", ci.path_discrepancy, t.path_f_factor * h * h);
  out.mesh = ci.mesh;
  SurfaceMesh& mesh = *out.mesh;
  mesh.provenance.emplace_back("mode", mode_name(pipeline));
  for (const auto& [k, v] : c.data) mesh.provenance.emplace_back(k, v);
  mesh.provenance.emplace_back("quadrature",
                               c.quadrature == Quadrature::Cubic ? "cubic" : "trapezoid");

  ck.begin("spacelike");
  const GeometryReport geo = analyze_geometry(mesh);
  ck.lower("spacelike", geo.min_gram_eigenvalue, t.spacelike);
  ck.begin("flat-K");
  ck.upper("flat-K", geo.max_abs_K, t.flat * hf);
  ck.upper("flat-K_N", geo.max_abs_K_N, t.flat * hf);
  ck.begin("curvature-identity");
  ck.upper("curvature-identity", geo.curvature_identity.max_residual, t.curvature_identity * hf);
  ojson sides;
  sides["max_abs_lhs"] = geo.curvature_identity.max_abs_lhs;
  sides["max_abs_rhs"] = geo.curvature_identity.max_abs_rhs;
  ck.upper("curvature-identity-flat-sides", std::max(geo.curvature_identity.max_abs_lhs, geo.curvature_identity.max_abs_rhs), t.flat * hf,
           sides);

  ck.begin("third-form");
  const ThirdFormReport third = check_third_form(mesh, geo.gauss, f1, f2);
  ojson third_extra;
  third_extra["max_absolute"] = third.max_residual;
  ck.upper("third-form", third.max_relative, t.third_form * hf, third_extra);
  double target_scale = 1.0;
  for (std::size_t i = 0; i < f1.size(); ++i) {
    const cplx a = f1.data()[i], b = f2.data()[i];
    target_scale = std::max(target_scale, std::abs(a * a + b * b));
  }
  ck.upper("third-form-antiholomorphic", third.max_antiholomorphic / target_scale, t.third_form * hf);

  ck.begin("gauss-map");
  double gdev = 0;
  for (std::size_t k = 1; k + 1 < grid.ny; ++k)
    for (std::size_t j = 1; j + 1 < grid.nx; ++j) {
      const CQuat& g = spin.g(j, k).value();
      const Coframe& w = frame.coframe(j, k);
      const double s = (w.w1x * w.w2y - w.w1y * w.w2x) > 0 ? 1.0 : -1.0;
      const Bivector expected = Bivector::from_cquat(inverse(g) * CQuat::unit_i() * g);
      gdev = std::max(gdev, coeff_norm(geo.gauss(j, k) - s * expected));
    }
  ck.upper("gauss-map", gdev, t.geom * hf);

  if (!c.reference.empty()) reference_check(c, "alignment", mesh.F, grid, t.align * hf * hf, true, ck);

  out.metrics["K"] = geo.max_abs_K;
  out.metrics["K_N"] = geo.max_abs_K_N;
  out.metrics["curvature-identity"] = geo.curvature_identity.max_residual;
  out.metrics["third-form"] = third.max_residual;
  out.metrics["closedness"] = ci.closedness_residual;
  out.metrics["spin_path"] = spin.path_discrepancy;
  out.metrics["f_path"] = ci.path_discrepancy;

  ojson& d = out.diagnostics;
  d["base_node"] = {spin.base.j, spin.base.k};
  d["spin_max_drift"] = spin.max_drift;
  d["xi_reality_residual"] = xi.max_reality_residual;
  d["closedness_residual"] = ci.closedness_residual;
  d["third_form_max_absolute"] = third.max_residual;
  d["third_form_max_antiholomorphic"] = third.max_antiholomorphic;
  geometry_diagnostics(geo, mesh, c.dump_nodes, d);
  if (c.dump_nodes) d["nodes"]["third_form_value"] = cplx_field_json(third.value);
}

// ---------------------------------------------------------------------------
// Flat surfaces in H^3

struct H3Products {
  std::optional<SL2Field> sl2;
  std::optional<H3Mesh> mesh;
  std::map<std::string, double> metrics;
  ojson diagnostics = ojson::object();
};

std::vector<std::string> h3_checks(const RunConfig& c) {
  std::vector<std::string> v = {"input-holomorphy", "det-drift",  "sl2-path-independence",
                                "hermiticity",      "det-F",      "future-sheet",
                                "regularity",       "intrinsic-flatness"};
  if (!c.reference.empty()) v.push_back("reference");
  return v;
}

Mat2C mat_from_array(const std::array<double, 8>& a) {
  return {cplx(a[0], a[1]), cplx(a[2], a[3]), cplx(a[4], a[5]), cplx(a[6], a[7])};
}

void run_h3(const RunConfig& c, const GridDomain& grid, BaseNode base, Checks& ck,
            H3Products& out) {
  const Tolerances& t = c.tol;
  const double hf = Tolerances::h_factor(grid.h());
  const ExprFn theta = expr(c, "theta"), omega = expr(c, "omega");

  ck.begin("input-holomorphy");
  const auto thF = sample_expr(grid, theta), omF = sample_expr(grid, omega);
  ck.upper("input-holomorphy", std::max(holo_residual(thF, grid), holo_residual(omF, grid)),
           t.holo * hf);

  ck.begin("det-drift");
  out.sl2 = integrate_sl2(theta, omega, mat_from_array(c.B0), grid, base);
  const SL2Field& sl2 = *out.sl2;
  ojson dx;
  dx["renormalized_nodes"] = sl2.renormalized_nodes;
  ck.upper("det-drift", sl2.max_drift, t.h3_det * hf * hf, dx);
  ck.begin("sl2-path-independence");
  ck.upper("sl2-path-independence", sl2.path_discrepancy, t.path_spin * hf * hf);

  ck.begin("hermiticity");
  out.mesh = immerse_h3(sl2, grid);
  const H3Mesh& m = *out.mesh;
  ck.upper("hermiticity", m.max_hermiticity_defect, t.h3_herm);
  ck.upper("det-F", m.max_det_defect, t.h3_det);
  ck.lower("future-sheet", m.min_x0, 1.0 - t.h3_det);

  ck.begin("regularity");
  H3Report hr;
  try {
    hr = check_h3_flat(m, &thF, &omF);
  } catch (const NotImmersed& e) {
    ck.error(e);
    throw StopPipeline{};
  }
  ojson rx;
  rx["source"] = hr.margin_from_coefficients ? "coefficients" : "differential";
  ck.lower("regularity", hr.regularity_margin, t.regular, rx);
  ck.begin("intrinsic-flatness");
  ck.upper("intrinsic-flatness", hr.max_abs_K, t.flat * hf);

  if (!c.reference.empty()) reference_check(c, "reference", m.X, grid, t.h3_ref, false, ck);

  out.metrics["K"] = hr.max_abs_K;
  out.metrics["sl2_path"] = sl2.path_discrepancy;
  ojson& d = out.diagnostics;
  d["base_node"] = {sl2.base.j, sl2.base.k};
  d["det_max_drift"] = sl2.max_drift;
  d["regularity_margin"] = hr.regularity_margin;
  d["min_x0"] = m.min_x0;
  if (c.dump_nodes) {
    const auto K = brioschi_curvature(grid, first_forms(m.as_surface()));
    d["nodes"]["K_intrinsic"] = real_field_json(K);
  }
}

// ---------------------------------------------------------------------------
// Verification of a given mesh

SurfaceMesh analyze_input(const RunConfig& c) {
  if (c.analyze_mesh) return parse_mesh_csv(read_text(*c.analyze_mesh));
  std::array<ExprFn, 4> e;
  for (int i = 0; i < 4; ++i) e[i] = ExprFn::parse(c.analyze_surface.at("x" + std::to_string(i)));
  SurfaceMesh m;
  m.grid = c.domain;
  m.F = sample(m.grid, [&](std::size_t j, std::size_t k) {
    MinkVec v;
    for (int i = 0; i < 4; ++i) v[i] = e[i].real(m.grid.x(j), m.grid.y(k));
    return v;
  });
  for (int i = 0; i < 4; ++i)
    m.provenance.emplace_back("x" + std::to_string(i), c.analyze_surface.at("x" + std::to_string(i)));
  return m;
}

std::vector<std::string> analyze_checks(const RunConfig& c) {
  std::vector<std::string> v = {"spacelike", "curvature-identity", "k-consistency"};
  if (c.expect_flat) {
    v.push_back("flat-K");
    v.push_back("flat-K_N");
    v.push_back("curvature-identity-flat-sides");
  }
  if (c.data.count("f1") && c.data.count("f2")) {
    v.push_back("third-form");
    v.push_back("third-form-antiholomorphic");
  }
  for (const auto& [k, val] : c.expect) v.push_back("expected-" + k);
  return v;
}

void run_analyze(const RunConfig& c, Checks& ck, std::optional<SurfaceMesh>& mesh_out,
                 ojson& diag) {
  const Tolerances& t = c.tol;
  ck.begin("spacelike");
  mesh_out = analyze_input(c);
  const SurfaceMesh& mesh = *mesh_out;
  const GridDomain& grid = mesh.grid;
  const double hf = Tolerances::h_factor(grid.h());
  diag["grid"] = grid_json(grid);
  const GeometryReport geo = analyze_geometry(mesh);
  ck.lower("spacelike", geo.min_gram_eigenvalue, t.spacelike);
  ck.begin("curvature-identity");
  ck.upper("curvature-identity", geo.curvature_identity.max_residual, t.curvature_identity * hf);
  ck.upper("k-consistency", geo.max_K_consistency, t.geom * hf);
  if (c.expect_flat) {
    ck.upper("flat-K", geo.max_abs_K, t.flat * hf);
    ck.upper("flat-K_N", geo.max_abs_K_N, t.flat * hf);
    ck.upper("curvature-identity-flat-sides", std::max(geo.curvature_identity.max_abs_lhs, geo.curvature_identity.max_abs_rhs), t.flat * hf);
  }
  if (c.data.count("f1") && c.data.count("f2")) {
    ck.begin("third-form");
    const auto f1 = sample_expr(grid, expr(c, "f1")), f2 = sample_expr(grid, expr(c, "f2"));
    const ThirdFormReport third = check_third_form(mesh, geo.gauss, f1, f2);
    ck.upper("third-form", third.max_relative, t.third_form * hf);
    double scale = 1.0;
    for (std::size_t i = 0; i < f1.size(); ++i)
      scale = std::max(scale, std::abs(f1.data()[i] * f1.data()[i] + f2.data()[i] * f2.data()[i]));
    ck.upper("third-form-antiholomorphic", third.max_antiholomorphic / scale, t.third_form * hf);
  }
  for (const auto& [k, want] : c.expect) {
    const std::string name = "expected-" + k;
    ck.begin(name);
    if (k == "integral_K") {
      ck.upper(name, std::abs(geo.integrals.K - want), t.integral);
    } else if (k == "integral_K_N") {
      ck.upper(name, std::abs(geo.integrals.K_N - want), t.integral);
    } else {
      const GridField<double>& f = k == "K" ? geo.curv.K : geo.curv.K_N;
      double dev = 0;
      for (std::size_t kk = 1; kk + 1 < grid.ny; ++kk)
        for (std::size_t j = 1; j + 1 < grid.nx; ++j) dev = std::max(dev, std::abs(f(j, kk) - want));
      ck.upper(name, dev, t.geom * hf);
    }
  }
  geometry_diagnostics(geo, mesh, c.dump_nodes, diag);
}

// ---------------------------------------------------------------------------
// Convergence studies

// Orders are only meaningful while the errors sit above the rounding floor.
struct OrderSpec {
  std::string metric;
  double expected;
  double lo, hi;
  double floor;
};

ojson measure_orders(const std::vector<double>& errors, const OrderSpec& s, bool& pass) {
  ojson o;
  o["errors"] = errors;
  o["expected"] = s.expected;
  o["band"] = {s.lo, s.hi};
  o["noise_floor"] = s.floor;
  const bool resolved = std::all_of(errors.begin(), errors.end(), [&](double e) { return e > s.floor; });
  ojson orders = ojson::array();
  pass = true;
  if (resolved) {
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
      const double p = std::log2(errors[i] / errors[i + 1]);
      orders.push_back(p);
      pass = pass && p >= s.lo && p <= s.hi;
    }
    o["exact"] = false;
  } else {
    // Below the floor on some level: the scheme is exact for these data,
    // provided nothing grows past the floor.
    const double worst = *std::max_element(errors.begin(), errors.end());
    o["exact"] = true;
    pass = worst <= s.floor * 1e3;
  }
  o["orders"] = orders;
  return o;
}

template <typename T, typename Dist>
double successive_difference(const GridField<T>& coarse, const GridField<T>& fine, Dist&& dist) {
  double m = 0;
  for (std::size_t k = 0; k < coarse.ny(); ++k)
    for (std::size_t j = 0; j < coarse.nx(); ++j)
      m = std::max(m, dist(coarse(j, k), fine(2 * j, 2 * k)));
  return m;
}

void run_converge(const RunConfig& c, Checks& ck, ojson& diag) {
  ck.begin("level-runs");
  const bool h3 = c.pipeline == Mode::GenH3;
  const BaseNode base0 = resolve_base(c, c.domain);
  std::vector<GridDomain> grids;
  std::vector<FlatProducts> flat(c.levels);
  std::vector<H3Products> hyp(c.levels);
  ojson levels = ojson::array();
  const std::vector<std::string> geo_metrics =
      h3 ? std::vector<std::string>{"K"} : std::vector<std::string>{"K", "K_N", "curvature-identity", "third-form"};
  // A level whose own tolerance checks fail still feeds the order study; only
  // missing products (a pipeline stopped by an error) make the ladder unusable.
  bool complete = true;
  for (std::size_t l = 0; l < c.levels; ++l) {
    const std::size_t f = std::size_t{1} << l;
    grids.push_back(c.domain.refined(f));
    const BaseNode base{base0.j * f, base0.k * f};
    Checks lck(h3 ? h3_checks(c) : flat_checks(c));
    guarded(lck, [&] {
      if (h3)
        run_h3(c, grids.back(), base, lck, hyp[l]);
      else
        run_flat(c, c.pipeline, grids.back(), base, lck, flat[l]);
    });
    ojson e;
    e["grid"] = grid_json(grids.back());
    e["status"] = lck.failed() ? "fail" : "pass";
    if (lck.failed()) e["first_failure"] = lck.first_failure();
    e["metrics"] = h3 ? hyp[l].metrics : flat[l].metrics;
    const auto& metrics = h3 ? hyp[l].metrics : flat[l].metrics;
    bool have = h3 ? (hyp[l].sl2 && hyp[l].mesh) : (flat[l].spin && flat[l].mesh);
    for (const auto& m : geo_metrics) have = have && metrics.count(m) > 0;
    e["complete"] = have;
    levels.push_back(e);
    complete = complete && have;
  }
  diag["levels"] = levels;
  ck.flag("level-runs", complete);
  if (!complete) return;

  ojson orders;
  auto order_check = [&](const std::string& name, const std::vector<double>& errors,
                         const OrderSpec& s) {
    bool pass = false;
    ojson o = measure_orders(errors, s, pass);
    orders[s.metric] = o;
    ck.flag(name, pass, o);
  };

  std::vector<double> integ, fdiff;
  for (std::size_t l = 0; l + 1 < c.levels; ++l) {
    if (h3) {
      integ.push_back(successive_difference(hyp[l].sl2->B, hyp[l + 1].sl2->B,
                                            [](const Mat2C& a, const Mat2C& b) { return frob_norm(a - b); }));
    } else {
      integ.push_back(successive_difference(flat[l].spin->g, flat[l + 1].spin->g,
                                            [](const SpinElement& a, const SpinElement& b) {
                                              return coeff_norm(a.value() - b.value());
                                            }));
      fdiff.push_back(successive_difference(flat[l].mesh->F, flat[l + 1].mesh->F,
                                            [](const MinkVec& a, const MinkVec& b) { return euclid_norm(a - b); }));
    }
  }
  // Differences between consecutive levels carry the order of the scheme.
  order_check("order-integrator", integ, {h3 ? "sl2" : "spin", 4, 3.7, 4.3, 1e-12});
  if (!h3) {
    const bool cubic = c.quadrature == Quadrature::Cubic;
    order_check("order-F", fdiff,
                {"F", cubic ? 4.0 : 2.0, cubic ? 3.7 : 1.8, cubic ? 4.3 : 2.2, 1e-12});
  }

  // Geometric residuals of exact identities: error = residual itself. Their
  // rounding floor grows like eps / h^2 (second differences).
  const double hmin = grids.back().h();
  const double geo_floor = 1e4 * std::numeric_limits<double>::epsilon() / (hmin * hmin);
  for (const auto& m : geo_metrics) {
    std::vector<double> errs;
    for (std::size_t l = 0; l < c.levels; ++l) errs.push_back(h3 ? hyp[l].metrics.at(m) : flat[l].metrics.at(m));
    order_check("order-" + m, errs, {m, 2, 1.8, 2.2, geo_floor});
  }
  diag["orders"] = orders;
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<Mode> parse_mode(const std::string& name) {
  auto it = mode_table().find(name);
  if (it == mode_table().end()) return std::nullopt;
  return it->second;
}

std::string mode_name(Mode m) {
  for (const auto& [k, v] : mode_table())
    if (v == m) return k;
  return "unknown";
}

RunConfig parse_config(const nlohmann::json& input, Mode mode) {
  const ojson doc = ojson::parse(input.dump());
  check_keys(doc, "config",
             {"mode", "domain", "data", "seeds", "tolerances", "output", "reference", "analyze",
              "converge", "quadrature", "dump_nodes"});
  RunConfig c;
  c.mode = mode;
  c.pipeline = mode;
  c.echo = doc;
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string() || doc["mode"].get<std::string>() != mode_name(mode))
      config_error("config mode does not match the subcommand '" + mode_name(mode) + "'");
  }

  if (mode == Mode::Converge) {
    if (!doc.contains("converge")) config_error("converge requires a 'converge' section");
    const ojson& cv = doc["converge"];
    check_keys(cv, "converge", {"pipeline", "levels"});
    if (!cv.contains("pipeline") || !cv["pipeline"].is_string())
      config_error("converge.pipeline must name gen-flat, gen-flat-psi or gen-h3");
    const auto p = parse_mode(cv["pipeline"].get<std::string>());
    if (!p || *p == Mode::Analyze || *p == Mode::Converge)
      config_error("converge.pipeline must be gen-flat, gen-flat-psi or gen-h3");
    c.pipeline = *p;
    if (cv.contains("levels")) c.levels = get_count(cv["levels"], "converge.levels");
    if (c.levels < 3) config_error("converge.levels must be at least 3");
  }

  const bool needs_domain = !(mode == Mode::Analyze && doc.contains("analyze") &&
                              doc["analyze"].contains("mesh"));
  if (needs_domain) {
    if (!doc.contains("domain")) config_error("config requires 'domain'");
    const ojson& d = doc["domain"];
    check_keys(d, "domain", {"x", "y", "nx", "ny", "n"});
    const auto x = get_reals<2>(d.value("x", ojson()), "domain.x");
    const auto y = get_reals<2>(d.value("y", ojson()), "domain.y");
    std::size_t nx = 0, ny = 0;
    if (d.contains("n")) nx = ny = get_count(d["n"], "domain.n");
    if (d.contains("nx")) nx = get_count(d["nx"], "domain.nx");
    if (d.contains("ny")) ny = get_count(d["ny"], "domain.ny");
    try {
      c.domain = GridDomain(x[0], x[1], y[0], y[1], nx, ny);
    } catch (const InvalidGrid& e) {
      config_error(std::string("domain: ") + e.what());
    }
  }

  if (doc.contains("data"))
    parse_expr_map(doc["data"], "data", {"f1", "f2", "h0", "h1", "psi", "theta", "omega"}, c.data);
  switch (c.pipeline) {
    case Mode::GenFlat: require(c.data, "data", {"f1", "f2", "h0", "h1"}); break;
    case Mode::GenFlatPsi: require(c.data, "data", {"psi", "h0", "h1"}); break;
    case Mode::GenH3: require(c.data, "data", {"theta", "omega"}); break;
    default: break;
  }

  if (doc.contains("seeds")) {
    const ojson& s = doc["seeds"];
    check_keys(s, "seeds", {"g0", "F0", "B0", "base"});
    if (s.contains("g0")) c.g0 = get_reals<8>(s["g0"], "seeds.g0");
    if (s.contains("F0")) {
      const auto f = get_reals<4>(s["F0"], "seeds.F0");
      c.F0 = {f[0], f[1], f[2], f[3]};
    }
    if (s.contains("B0")) c.B0 = get_reals<8>(s["B0"], "seeds.B0");
    if (s.contains("base")) {
      const ojson& b = s["base"];
      if (b.is_string() && (b == "origin" || b == "corner")) {
        c.base = b.get<std::string>();
      } else if (b.is_array() && b.size() == 2) {
        c.base_node = BaseNode{get_count(b[0], "seeds.base[0]"), get_count(b[1], "seeds.base[1]")};
        if (c.base_node->j >= c.domain.nx || c.base_node->k >= c.domain.ny)
          config_error("seeds.base lies outside the grid");
      } else {
        config_error("seeds.base must be \"origin\", \"corner\" or [j, k]");
      }
    }
  }
  if (std::abs(h_form(cquat_from_array(c.g0), cquat_from_array(c.g0)) - 1.0) > c.tol.spin)
    config_error("seeds.g0 must satisfy H(g0, g0) = 1");
  if (std::abs(mat_from_array(c.B0).det() - 1.0) > c.tol.spin)
    config_error("seeds.B0 must have determinant 1");

  if (doc.contains("quadrature")) {
    const ojson& q = doc["quadrature"];
    if (q == "cubic") c.quadrature = Quadrature::Cubic;
    else if (q == "trapezoid") c.quadrature = Quadrature::Trapezoid;
    else config_error("quadrature must be \"cubic\" or \"trapezoid\"");
  }

  if (doc.contains("tolerances")) {
    const ojson& t = doc["tolerances"];
    if (!t.is_object()) config_error("tolerances must be an object");
    for (const auto& [k, v] : t.items()) {
      if (k == "escalate_warnings" || k == "escalate-warnings") {
        if (!v.is_boolean()) config_error("tolerances." + k + " must be true or false");
        c.tol.escalate_warnings = v.get<bool>();
        continue;
      }
      const double val = get_number(v, "tolerances." + k);
      if (!(val > 0)) config_error("tolerances." + k + " must be positive");
      if (!c.tol.set(normalize_tol_name(k), val)) config_error("unknown tolerance '" + k + "'");
    }
  }

  if (doc.contains("reference")) {
    const ojson& r = doc["reference"];
    parse_expr_map(r, "reference", {"x0", "x1", "x2", "x3", "a", "b", "d", "align"}, c.reference);
    if (r.contains("align")) {
      if (!r["align"].is_boolean()) config_error("reference.align must be true or false");
      c.align = r["align"].get<bool>();
    }
    const bool coords = c.reference.count("x0") || c.reference.count("x1") ||
                        c.reference.count("x2") || c.reference.count("x3");
    if (coords) require(c.reference, "reference", {"x0", "x1", "x2", "x3"});
    else require(c.reference, "reference", {"a", "b", "d"});
    if (!coords && c.pipeline != Mode::GenH3)
      config_error("reference entries a, b, d are only meaningful for gen-h3");
  }

  if (mode == Mode::Analyze) {
    if (!doc.contains("analyze")) config_error("analyze requires an 'analyze' section");
    const ojson& a = doc["analyze"];
    check_keys(a, "analyze", {"mesh", "surface", "expect", "expect_flat"});
    if (a.contains("mesh")) {
      if (!a["mesh"].is_string()) config_error("analyze.mesh must be a path");
      c.analyze_mesh = a["mesh"].get<std::string>();
    } else if (a.contains("surface")) {
      parse_expr_map(a["surface"], "analyze.surface", {"x0", "x1", "x2", "x3"}, c.analyze_surface);
      require(c.analyze_surface, "analyze.surface", {"x0", "x1", "x2", "x3"});
    } else {
      config_error("analyze requires 'mesh' (CSV path) or 'surface' (x0..x3 expressions)");
    }
    if (a.contains("expect")) {
      check_keys(a["expect"], "analyze.expect", {"K", "K_N", "integral_K", "integral_K_N"});
      for (const auto& [k, v] : a["expect"].items()) c.expect[k] = get_number(v, "analyze.expect." + k);
    }
    if (a.contains("expect_flat")) {
      if (!a["expect_flat"].is_boolean()) config_error("analyze.expect_flat must be true or false");
      c.expect_flat = a["expect_flat"].get<bool>();
    }
  }

  if (doc.contains("output")) {
    const ojson& o = doc["output"];
    check_keys(o, "output", {"dir", "prefix", "formats"});
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) config_error("output.dir must be a string");
      c.output.dir = o["dir"].get<std::string>();
    }
    if (o.contains("prefix")) {
      if (!o["prefix"].is_string()) config_error("output.prefix must be a string");
      c.output.prefix = o["prefix"].get<std::string>();
    }
    if (o.contains("formats")) {
      if (!o["formats"].is_array()) config_error("output.formats must be an array");
      c.output.formats.clear();
      for (const auto& f : o["formats"]) {
        if (!f.is_string() || (f != "csv" && f != "json" && f != "obj"))
          config_error("output.formats entries must be csv, json or obj");
        c.output.formats.push_back(f.get<std::string>());
      }
    }
  }
  if (doc.contains("dump_nodes")) {
    if (!doc["dump_nodes"].is_boolean()) config_error("dump_nodes must be true or false");
    c.dump_nodes = doc["dump_nodes"].get<bool>();
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, Mode mode) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const IOError& e) {
    throw ConfigError(e.what());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc, mode);
}

RunResult run(const RunConfig& c) {
  ToleranceScope scope(c.tol);
  reset_warnings();
  RunResult r;
  ojson diag = ojson::object();
  std::vector<std::string> planned;
  switch (c.mode) {
    case Mode::GenFlat:
    case Mode::GenFlatPsi: planned = flat_checks(c); break;
    case Mode::GenH3: planned = h3_checks(c); break;
    case Mode::Analyze: planned = analyze_checks(c); break;
    case Mode::Converge: planned = {"level-runs"}; break;
  }
  Checks ck(planned);

  guarded(ck, [&] {
    switch (c.mode) {
      case Mode::GenFlat:
      case Mode::GenFlatPsi: {
        FlatProducts p;
        try {
          run_flat(c, c.mode, c.domain, resolve_base(c, c.domain), ck, p);
        } catch (...) {
          r.mesh = p.mesh;
          diag = p.diagnostics;
          throw;
        }
        r.mesh = p.mesh;
        diag = p.diagnostics;
        break;
      }
      case Mode::GenH3: {
        H3Products p;
        try {
          run_h3(c, c.domain, resolve_base(c, c.domain), ck, p);
        } catch (...) {
          r.h3 = p.mesh;
          diag = p.diagnostics;
          throw;
        }
        r.h3 = p.mesh;
        diag = p.diagnostics;
        if (r.h3) {
          r.mesh = r.h3->as_surface();
          r.mesh->provenance = {{"mode", "gen-h3"}, {"theta", c.data.at("theta")},
                                {"omega", c.data.at("omega")}};
        }
        break;
      }
      case Mode::Analyze: run_analyze(c, ck, r.mesh, diag); break;
      case Mode::Converge: run_converge(c, ck, diag); break;
    }
  });

  r.first_failure = ck.first_failure();
  r.status = ck.failed() ? 1 : 0;

  ojson rep;
  rep["mode"] = mode_name(c.mode);
  if (c.mode == Mode::Converge) rep["pipeline"] = mode_name(c.pipeline);
  rep["status"] = r.status == 0 ? "pass" : "fail";
  rep["first_failure"] = r.first_failure.empty() ? ojson() : ojson(r.first_failure);
  if (c.mode != Mode::Analyze || !c.analyze_mesh) rep["grid"] = grid_json(c.domain);
  rep["quadrature"] = c.quadrature == Quadrature::Cubic ? "cubic" : "trapezoid";
  ojson tol;
  for (const auto& [k, v] : c.tol.as_map()) tol[k] = v;
  tol["escalate-warnings"] = c.tol.escalate_warnings;
  rep["tolerances"] = tol;
  rep["checks"] = ck.finish();
  rep["warnings"] = warning_count();
  rep["diagnostics"] = diag;
  rep["config"] = c.echo;
  r.report = std::move(rep);
  return r;
}

void write_outputs(const RunConfig& c, const RunResult& r) {
  std::error_code ec;
  std::filesystem::create_directories(c.output.dir, ec);
  if (ec) throw IOError("cannot create " + c.output.dir.string() + ": " + ec.message());
  const auto base = c.output.dir / c.output.prefix;
  if (r.mesh && c.mode != Mode::Analyze) {
    for (const auto& f : c.output.formats) {
      if (f == "csv") {
        write_text(base.string() + ".csv", mesh_csv(*r.mesh));
      } else if (f == "obj") {
        write_text(base.string() + ".obj",
                   mesh_obj(*r.mesh, r.h3 ? Projection::PoincareBall : Projection::DropX0));
      } else if (f == "json") {
        ojson j = r.h3 ? mesh_json(*r.h3) : mesh_json(*r.mesh);
        j["report"] = r.report;
        write_text(base.string() + ".json", j.dump(2) + "\n");
      }
    }
  }
  write_text(c.output.dir / "report.json", r.report.dump(2) + "\n");
}

}  // namespace spinflat
