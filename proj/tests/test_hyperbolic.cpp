#include <doctest.h>

#include "spinflat/errors.hpp"
#include "spinflat/hyperbolic.hpp"
#include "spinflat/integrate.hpp"
#include "support.hpp"

using namespace spinflat;

namespace {

const cplx i1{0.0, 1.0};

GridDomain square(std::size_t n, double r) { return GridDomain(-r, r, -r, r, n, n); }

H3Mesh run_h3(const GridDomain& grid, const char* theta, const char* omega,
              const Mat2C& B0 = Mat2C::identity()) {
  const auto f = integrate_sl2(ExprFn::parse(theta), ExprFn::parse(omega), B0, grid,
                               base_near_origin(grid));
  return immerse_h3(f, grid);
}

GridField<cplx> constant(const GridDomain& grid, cplx v) { return GridField<cplx>(grid, v); }

}  // namespace

TEST_CASE("Hermitian chart golden values") {
  CHECK(herm_to_mink(Mat2C::identity()) == MinkVec{1, 0, 0, 0});
  const Mat2C F{3.0, cplx(1, 2), cplx(1, -2), 1.0};
  CHECK(herm_to_mink(F) == MinkVec{2, 1, 1, 2});
  CHECK(mink_to_herm(MinkVec{2, 1, 1, 2}) == F);
  // -det F is the Minkowski norm.
  CHECK(mink_norm(herm_to_mink(F)) == doctest::Approx(-F.det().real()));
}

TEST_CASE("property: chart is a linear isometry from (Herm(2), -det)") {
  testing::Draw d(41);
  double worst = 0;
  for (int n = 0; n < 10000; ++n) {
    const MinkVec v = d.mink(2.0);
    const Mat2C F = mink_to_herm(v);
    worst = std::max(worst, std::abs(mink_norm(v) + F.det().real()) + std::abs(F.det().imag()));
    worst = std::max(worst, euclid_norm(herm_to_mink(F) - v));
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("horosphere: closed form, unit determinant and flatness") {
  const GridDomain grid = square(101, 1.0);
  const H3Mesh m = run_h3(grid, "1", "0");
  double err = 0;
  for (std::size_t k = 0; k < grid.ny; ++k)
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const cplx z = grid.z(j, k);
      const Mat2C want{1.0 + std::norm(z), z, std::conj(z), 1.0};
      err = std::max(err, frob_norm(m.F(j, k) - want));
    }
  CHECK(err <= 1e-8);
  CHECK(m.max_det_defect <= 1e-8);
  CHECK(m.max_hermiticity_defect <= 1e-10);
  CHECK(m.min_x0 >= 1.0 - 1e-12);
  const auto theta = constant(grid, 1.0), omega = constant(grid, 0.0);
  const H3Report r = check_h3_flat(m, &theta, &omega);
  CHECK(r.max_abs_K <= 1e-3);
  CHECK(r.margin_from_coefficients);
  CHECK(r.regularity_margin == doctest::Approx(1.0));
}

TEST_CASE("theta = dz, omega = dz/2 is regular and flat") {
  const GridDomain grid = square(101, 0.5);
  const H3Mesh m = run_h3(grid, "1", "0.5");
  CHECK(m.max_det_defect <= 1e-8);
  const auto theta = constant(grid, 1.0), omega = constant(grid, 0.5);
  const H3Report r = check_h3_flat(m, &theta, &omega);
  CHECK(r.regularity_margin == doctest::Approx(0.5));
  CHECK(r.max_abs_K <= 1e-3);
  // Without coefficients the margin comes from the induced metric.
  const H3Report s = check_h3_flat(m);
  CHECK_FALSE(s.margin_from_coefficients);
  CHECK(s.regularity_margin > 0.1);
}

TEST_CASE("|theta| = |omega| is detected") {
  const GridDomain grid = square(21, 0.5);
  const H3Mesh m = run_h3(grid, "1", "1");
  const auto theta = constant(grid, 1.0), omega = constant(grid, 1.0);
  CHECK_THROWS_AS(check_h3_flat(m, &theta, &omega), NotImmersed);
  CHECK_THROWS_AS(check_h3_flat(m), NotImmersed);
}

TEST_CASE("SL2 seed must have unit determinant") {
  const GridDomain grid = square(11, 0.5);
  CHECK_THROWS_AS(integrate_sl2(ExprFn::parse("1"), ExprFn::parse("0"), Mat2C{2.0, 0.0, 0.0, 1.0},
                                grid, base_near_origin(grid)),
                  std::invalid_argument);
}

TEST_CASE("left SU(2) action gives an isometric surface") {
  const GridDomain grid = square(61, 0.5);
  const cplx a = std::polar(0.8, 0.3), b = std::polar(0.6, -1.1);
  const Mat2C U{a, -std::conj(b), b, std::conj(a)};
  CHECK(std::abs(U.det() - 1.0) < 1e-15);
  const H3Mesh m0 = run_h3(grid, "exp(z)", "0.3");
  const H3Mesh m1 = run_h3(grid, "exp(z)", "0.3", U);
  const H3Report r0 = check_h3_flat(m0), r1 = check_h3_flat(m1);
  CHECK(std::abs(r0.max_abs_K - r1.max_abs_K) <= 1e-8);
  // Pairwise Minkowski distances are preserved.
  for (std::size_t i = 0; i < m0.X.size(); i += 97) {
    const MinkVec d0 = m0.X.data()[i] - m0.X.data()[0], d1 = m1.X.data()[i] - m1.X.data()[0];
    CHECK(mink_norm(d1) == doctest::Approx(mink_norm(d0)).epsilon(1e-10));
  }
}

TEST_CASE("spin frame of (f1, f2) = (-1/2, i/2) reproduces the horosphere") {
  // A(f1 J + f2 K) = [[0, -1], [0, 0]], so the matrix of bar(g) solves
  // B' = B [[0, 1], [0, 0]] and i bar(g) hat(g) is the horosphere in the
  // Minkowski model. The Hermitian chart reads it as (P0, P1, P3, -P2).
  const GridDomain grid = square(41, 0.5);
  const BaseNode base = base_near_origin(grid);
  const auto spin = integrate_spin(
      ConnectionForm::from_functions([](cplx) { return std::pair<cplx, cplx>{-0.5, 0.5 * i1}; }),
      SpinElement(), grid, base);
  const H3Mesh m = run_h3(grid, "1", "0");
  double matrix_err = 0, chart_err = 0;
  for (std::size_t k = 0; k < grid.ny; ++k)
    for (std::size_t j = 0; j < grid.nx; ++j) {
      const CQuat& g = spin.g(j, k).value();
      const cplx z = grid.z(j, k);
      matrix_err = std::max(matrix_err, frob_norm(to_mat2(bar(g)) - Mat2C{1.0, z, 0.0, 1.0}));
      const MinkVec P = mink_extract(i1 * (bar(g) * hat(g)));
      chart_err = std::max(chart_err, euclid_norm(m.X(j, k) - MinkVec{P.x0, P.x1, P.x3, -P.x2}));
    }
  CHECK(matrix_err < 1e-12);
  CHECK(chart_err < 1e-12);
}

TEST_CASE("Poincare ball projection stays inside the unit ball") {
  const GridDomain grid = square(41, 2.0);
  const H3Mesh m = run_h3(grid, "1", "0.5");
  double r = 0;
  for (const auto& x : m.X.data()) {
    const auto p = poincare_ball(x);
    r = std::max(r, std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
  }
  CHECK(r < 1.0);
  const auto o = poincare_ball({1, 0, 0, 0});
  CHECK(o == std::array<double, 3>{0, 0, 0});
}

TEST_CASE("H3 surface exposes its Minkowski coordinates") {
  const GridDomain grid = square(5, 0.5);
  const H3Mesh m = run_h3(grid, "1", "0");
  const SurfaceMesh s = m.as_surface();
  CHECK(s.grid == grid);
  CHECK(s.F.data() == m.X.data());
}
