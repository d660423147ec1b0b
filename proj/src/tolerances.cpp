#include "spinflat/tolerances.hpp"

#include <algorithm>
#include <atomic>

#include "spinflat/errors.hpp"

namespace spinflat {

namespace {

Tolerances g_tolerances;
std::atomic<std::size_t> g_warning_count{0};

template <typename Fn>
void for_each_field(Tolerances& t, Fn&& fn) {
  fn("null", t.null);
  fn("real", t.real);
  fn("spin", t.spin);
  fn("frame", t.frame);
  fn("degen", t.degen);
  fn("indep", t.indep);
  fn("commute", t.commute);
  fn("holo", t.holo);
  fn("tangency", t.tangency);
  fn("closed-factor", t.closed_factor);
  fn("path-spin", t.path_spin);
  fn("path-f-factor", t.path_f_factor);
  fn("dirac", t.dirac);
  fn("spacelike", t.spacelike);
  fn("flat", t.flat);
  fn("curvature-identity", t.curvature_identity);
  fn("third-form", t.third_form);
  fn("geom", t.geom);
  fn("align", t.align);
  fn("h3-det", t.h3_det);
  fn("h3-herm", t.h3_herm);
  fn("regular", t.regular);
  fn("h3-ref", t.h3_ref);
  fn("integral", t.integral);
}

}  // namespace

double Tolerances::h_factor(double h) {
  const double r = h / 0.01;
  return std::max(1.0, r * r);
}

std::map<std::string, double> Tolerances::as_map() const {
  std::map<std::string, double> out;
  Tolerances copy = *this;
  for_each_field(copy, [&](const char* name, double& v) { out[name] = v; });
  return out;
}

bool Tolerances::set(const std::string& name, double value) {
  bool found = false;
  for_each_field(*this, [&](const char* n, double& v) {
    if (name == n) {
      v = value;
      found = true;
    }
  });
  return found;
}

const Tolerances& tolerances() { return g_tolerances; }

void set_tolerances(const Tolerances& t) { g_tolerances = t; }

void warn(const std::string& category, const std::string& message) {
  if (g_tolerances.escalate_warnings) {
    throw Error(category, message);
  }
  ++g_warning_count;
}

std::size_t warning_count() { return g_warning_count.load(); }

void reset_warnings() { g_warning_count = 0; }

}  // namespace spinflat
