#include <doctest.h>

#include "spinflat/errors.hpp"
#include "spinflat/surface.hpp"
#include "support.hpp"

using namespace spinflat;

namespace {

GridDomain square(std::size_t n, double r = 0.5) { return GridDomain(-r, r, -r, r, n, n); }

template <typename T, typename Fn>
double interior_max(const GridDomain& grid, const GridField<T>& f, Fn&& fn) {
  double worst = 0;
  for (std::size_t k = 1; k + 1 < grid.ny; ++k)
    for (std::size_t j = 1; j + 1 < grid.nx; ++j) worst = std::max(worst, fn(f(j, k)));
  return worst;
}

double max_abs(const GridDomain& grid, const GridField<double>& f, double target = 0.0) {
  return interior_max(grid, f, [&](double v) { return std::abs(v - target); });
}

// Unit sphere in the slice x0 = 0, longitude x and latitude y.
MinkVec sphere(double x, double y) {
  return {0, std::cos(y) * std::cos(x), std::cos(y) * std::sin(x), std::sin(y)};
}

// Graph over the (x1, x2) plane with timelike height a x y and spacelike
// height (x^2 - y^2) / 2. At the origin the normal parts of the second
// derivatives are F_xx = e1, F_yy = -e1, F_xy = a e0, so K = a^2 - 1 and
// |K_N| = 2 |a|.
MinkVec graph(double a, double x, double y) { return {a * x * y, x, y, 0.5 * (x * x - y * y)}; }

// An orthochronous Lorentz motion built from a spin element.
MinkVec moved(const SpinElement& q, const MinkVec& v) { return act_vector(q, v) + MinkVec{3, -1, 2, 0.5}; }

}  // namespace

TEST_CASE("plane has vanishing curvatures and constant Gauss map") {
  const GridDomain grid = square(21);
  const auto m = testing::mesh_from(grid, [](double x, double y) { return MinkVec{0, x, y, 0}; });
  const GeometryReport g = analyze_geometry(m);
  CHECK(g.max_abs_K < 1e-12);
  CHECK(g.max_abs_K_N < 1e-12);
  CHECK(g.max_abs_H2 < 1e-12);
  CHECK(g.min_gram_eigenvalue == doctest::Approx(1.0));
  for (const auto& G : g.gauss.data()) CHECK(coeff_norm(G - Bivector::e3()) < 1e-12);
  CHECK(g.integrals.area == doctest::Approx(1.0));
  CHECK(g.curvature_identity.max_residual < 1e-12);
}

TEST_CASE("normal frame is orthonormal, oriented and future directed") {
  const GridDomain grid = square(21);
  const auto m = testing::mesh_from(grid, [](double x, double y) { return graph(0.7, x, y); });
  const FormsField f = fundamental_forms(m);
  for (const auto& e : f.frame.data()) {
    CHECK(mink_norm(e.e0) == doctest::Approx(-1.0));
    CHECK(e.e0.x0 > 0);
    CHECK(mink_norm(e.e1) == doctest::Approx(1.0));
    CHECK(mink_norm(e.e2) == doctest::Approx(1.0));
    CHECK(mink_norm(e.e3) == doctest::Approx(1.0));
    CHECK(std::abs(mink_dot(e.e0, e.e1)) < 1e-12);
    CHECK(std::abs(mink_dot(e.e1, e.e2)) < 1e-12);
    CHECK(std::abs(mink_dot(e.e2, e.e3)) < 1e-12);
    CHECK(std::abs(mink_dot(e.e0, e.e3)) < 1e-12);
  }
}

TEST_CASE("unit sphere: K = 1, K_N = 0 and the curvature identity") {
  const GridDomain grid = square(101);
  const auto m = testing::mesh_from(grid, sphere);
  const GeometryReport g = analyze_geometry(m);
  CHECK(max_abs(grid, g.curv.K, 1.0) < 1e-3);
  CHECK(max_abs(grid, g.curv.K_intrinsic, 1.0) < 1e-3);
  CHECK(g.max_abs_K_N < 1e-10);
  CHECK(g.curvature_identity.max_residual <= 5e-3);
  CHECK(max_abs(grid, g.curv.H2, 1.0) < 1e-3);
  // Solid angle of the patch: 2 sin(1/2).
  CHECK(g.integrals.K == doctest::Approx(2 * std::sin(0.5)).epsilon(1e-4));
  CHECK(g.integrals.area == doctest::Approx(2 * std::sin(0.5)).epsilon(1e-4));
  CHECK(std::abs(g.integrals.K_N) < 1e-8);
}

TEST_CASE("graph: curvatures at the origin and the sign of K_N") {
  const GridDomain grid = square(101, 0.1);
  for (double a : {0.7, -0.7, 0.3}) {
    CAPTURE(a);
    const auto m = testing::mesh_from(grid, [a](double x, double y) { return graph(a, x, y); });
    const GeometryReport g = analyze_geometry(m);
    const std::size_t c = 50;
    CHECK(g.curv.K(c, c) == doctest::Approx(a * a - 1).epsilon(1e-3));
    CHECK(std::abs(g.curv.K_N(c, c)) == doctest::Approx(2 * std::abs(a)).epsilon(1e-3));
    // Frozen orientation: K_N carries the sign of -a.
    CHECK(g.curv.K_N(c, c) * a < 0);
    // The Gauss map identity ties the sign of K_N to Im of the area ratio.
    CHECK(g.curvature_identity.lhs(c, c).real() == doctest::Approx(g.curv.K(c, c)).epsilon(1e-3));
    CHECK(g.curvature_identity.lhs(c, c).imag() == doctest::Approx(g.curv.K_N(c, c)).epsilon(1e-3));
    CHECK(g.max_K_consistency < 1e-3);
  }
}

TEST_CASE("worked flat example: K = K_N = 0 and H(dG, dG) = 4") {
  const GridDomain grid = square(101);
  const auto m = testing::mesh_from(grid, testing::worked_surface);
  const GeometryReport g = analyze_geometry(m);
  CHECK(g.max_abs_K < 1e-3);
  CHECK(g.max_abs_K_N < 1e-3);
  CHECK(g.curvature_identity.max_abs_lhs < 1e-3);
  // Mean curvature vector of a product of a circle and a hyperbola of radius 1/2.
  CHECK(max_abs(grid, g.curv.H2) < 1e-3);
  const GridField<cplx> f1(grid, 1.0), f2(grid, 0.0);
  const ThirdFormReport r = check_third_form(m, g.gauss, f1, f2);
  CHECK(r.max_residual <= 1e-3);
  CHECK(r.max_antiholomorphic <= 1e-3);
}

TEST_CASE("curvatures are invariant under Lorentz motions") {
  const GridDomain grid = square(61, 0.1);
  const SpinElement q = testing::Draw(31).spin(0.5);
  const auto m = testing::mesh_from(grid, [](double x, double y) { return graph(0.4, x, y); });
  const auto mq = testing::mesh_from(grid, [&](double x, double y) { return moved(q, graph(0.4, x, y)); });
  const GeometryReport a = analyze_geometry(m), b = analyze_geometry(mq);
  for (std::size_t i = 0; i < a.curv.K.size(); ++i) {
    CHECK(b.curv.K.data()[i] == doctest::Approx(a.curv.K.data()[i]).epsilon(1e-6));
    CHECK(b.curv.K_N.data()[i] == doctest::Approx(a.curv.K_N.data()[i]).epsilon(1e-6));
    CHECK(b.curv.H2.data()[i] == doctest::Approx(a.curv.H2.data()[i]).epsilon(1e-6));
  }
  // The Gauss map moves by conjugation and keeps H(G, G) = 1.
  CHECK(b.max_gauss_norm_defect < 1e-10);
}

TEST_CASE("Brioschi curvature of known metrics") {
  const GridDomain grid = square(101);
  // Round metric dx^2 cos^2 y + dy^2 has K = 1.
  const GridField<FirstForm> round = sample(grid, [&](std::size_t, std::size_t k) {
    const double c = std::cos(grid.y(k));
    return FirstForm{c * c, 0.0, 1.0};
  });
  CHECK(max_abs(grid, brioschi_curvature(grid, round), 1.0) < 1e-3);
  // Hyperbolic upper half plane (y shifted to 1..2) has K = -1.
  const GridDomain upper(-0.5, 0.5, 1.0, 2.0, 101, 101);
  const GridField<FirstForm> hyp = sample(upper, [&](std::size_t, std::size_t k) {
    const double y = upper.y(k);
    return FirstForm{1 / (y * y), 0.0, 1 / (y * y)};
  });
  CHECK(max_abs(upper, brioschi_curvature(upper, hyp), -1.0) < 1e-3);
}

TEST_CASE("timelike and degenerate meshes are rejected") {
  const GridDomain grid = square(11);
  const auto lightlike = testing::mesh_from(grid, [](double x, double y) { return MinkVec{x, x, y, 0}; });
  CHECK_THROWS_AS(fundamental_forms(lightlike), NotSpacelike);
  const auto timelike = testing::mesh_from(grid, [](double x, double y) { return MinkVec{2 * x, x, y, 0}; });
  CHECK_THROWS_AS(fundamental_forms(timelike), NotSpacelike);
  CHECK(min_eigenvalue(FirstForm{2, 0, 3}) == doctest::Approx(2));
  CHECK(min_eigenvalue(FirstForm{1, 1, 1}) == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("trapezoid integral weights") {
  const GridDomain grid(0, 2, 0, 1, 5, 3);
  const auto xy = sample(grid, [&](std::size_t j, std::size_t k) { return grid.x(j) + grid.y(k); });
  CHECK(trapezoid_integral(grid, GridField<double>(grid, 1.0)) == doctest::Approx(2.0));
  CHECK(trapezoid_integral(grid, xy) == doctest::Approx(2.0 + 1.0));
}
