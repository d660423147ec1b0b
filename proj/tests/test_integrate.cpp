#include <doctest.h>

#include "spinflat/alignment.hpp"
#include "spinflat/errors.hpp"
#include "spinflat/integrate.hpp"
#include "support.hpp"

using namespace spinflat;

namespace {

const cplx i1{0.0, 1.0};

GridDomain square(std::size_t n) { return GridDomain(-0.5, 0.5, -0.5, 0.5, n, n); }

template <typename Fn>
double max_over(const GridDomain& grid, Fn&& fn) {
  double worst = 0;
  for (std::size_t k = 0; k < grid.ny; ++k)
    for (std::size_t j = 0; j < grid.nx; ++j) worst = std::max(worst, fn(j, k));
  return worst;
}

struct Pipeline {
  FrameField frame;
  SpinFrameField spin;
  XiField xi;
  ClosedIntegration closed;
};

Pipeline run_pipeline(const GridDomain& grid, const char* f1, const char* f2, const char* h0,
                      const char* h1, Quadrature rule = Quadrature::Cubic) {
  const ExprFn F1 = ExprFn::parse(f1), F2 = ExprFn::parse(f2);
  Pipeline p;
  const BaseNode base = base_near_origin(grid);
  p.frame = make_frame(grid, F1, F2, ExprFn::parse(h0), ExprFn::parse(h1));
  p.spin = integrate_spin(ConnectionForm::from_exprs(F1, F2), SpinElement(), grid, base);
  p.xi = build_xi(p.spin, p.frame);
  p.closed = integrate_closed(p.xi, MinkVec{}, grid, base, rule);
  return p;
}

std::vector<MinkVec> closed_form_points(const GridDomain& grid) {
  std::vector<MinkVec> pts;
  for (std::size_t k = 0; k < grid.ny; ++k)
    for (std::size_t j = 0; j < grid.nx; ++j)
      pts.push_back(testing::worked_surface(grid.x(j), grid.y(k)));
  return pts;
}

}  // namespace

TEST_CASE("base node is the node nearest the origin") {
  const BaseNode b = base_near_origin(square(101));
  CHECK(b.j == 50);
  CHECK(b.k == 50);
  const BaseNode c = base_near_origin(GridDomain(1, 2, -3, -1, 11, 11));
  CHECK(c.j == 0);
  CHECK(c.k == 10);
}

TEST_CASE("spin frame for f1 = 1, f2 = 0 is cos z + sin z J") {
  const GridDomain grid = square(101);
  const auto f = integrate_spin(
      ConnectionForm::from_functions([](cplx) { return std::pair<cplx, cplx>{1.0, 0.0}; }),
      SpinElement(), grid, base_near_origin(grid));
  const double err = max_over(grid, [&](std::size_t j, std::size_t k) {
    const cplx z = grid.z(j, k);
    return coeff_norm(f.g(j, k).value() - CQuat{std::cos(z), 0.0, std::sin(z), 0.0});
  });
  CHECK(err < 1e-10);
  CHECK(f.path_discrepancy < 1e-12);
  CHECK(f.max_drift < 1e-10);
}

TEST_CASE("spin frame for psi = pi/2 is cos z + sin z K") {
  const GridDomain grid = square(101);
  const auto f = integrate_spin_psi(ExprFn::parse("pi/2"), SpinElement(), grid,
                                    base_near_origin(grid));
  const double err = max_over(grid, [&](std::size_t j, std::size_t k) {
    const cplx z = grid.z(j, k);
    return coeff_norm(f.g(j, k).value() - CQuat{std::cos(z), 0.0, 0.0, std::sin(z)});
  });
  CHECK(err < 1e-9);
}

TEST_CASE("zero connection keeps the seed") {
  const GridDomain grid = square(11);
  const SpinElement g0(testing::Draw(21).spin());
  const auto f = integrate_spin(
      ConnectionForm::from_functions([](cplx) { return std::pair<cplx, cplx>{0.0, 0.0}; }), g0,
      grid, {3, 7});
  for (const auto& g : f.g.data()) CHECK(g.value() == g0.value());
}

TEST_CASE("seed enters by right multiplication") {
  // g' = A g is left-invariant in the seed: the frame from g0 is g(z) g0.
  const GridDomain grid = square(41);
  const BaseNode base = base_near_origin(grid);
  const auto conn = ConnectionForm::from_exprs(ExprFn::parse("z + 2"), ExprFn::parse("1"));
  const SpinElement g0 = testing::Draw(22).spin(0.5);
  const auto a = integrate_spin(conn, SpinElement(), grid, base);
  const auto b = integrate_spin(conn, g0, grid, base);
  const double err = max_over(grid, [&](std::size_t j, std::size_t k) {
    return coeff_norm(b.g(j, k).value() - a.g(j, k).value() * g0.value());
  });
  CHECK(err < 1e-12);
}

TEST_CASE("spin path orders agree for holomorphic data") {
  const GridDomain grid = square(101);
  const auto conn = ConnectionForm::from_exprs(ExprFn::parse("exp(z)"), ExprFn::parse("z"));
  const auto f = integrate_spin(conn, SpinElement(), grid, base_near_origin(grid));
  CHECK(f.path_discrepancy <= 1e-8);
  const auto rows = integrate_spin_path(conn, SpinElement(), grid, base_near_origin(grid),
                                        PathOrder::RowsFirst);
  const auto cols = integrate_spin_path(conn, SpinElement(), grid, base_near_origin(grid),
                                        PathOrder::ColumnsFirst);
  double d = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    d = std::max(d, coeff_norm(rows.data()[i].value() - cols.data()[i].value()));
  CHECK(d == doctest::Approx(f.path_discrepancy));
}

TEST_CASE("non-holomorphic connection is path dependent") {
  const GridDomain grid = square(101);
  const auto conn = ConnectionForm::from_exprs(ExprFn::parse("conj(z)"), ExprFn::parse("1"));
  const auto f = integrate_spin(conn, SpinElement(), grid, base_near_origin(grid));
  CHECK(f.path_discrepancy > 1e-3);
}

TEST_CASE("spin integration diverging beyond repair throws") {
  const GridDomain grid = square(3);
  const auto conn = ConnectionForm::from_exprs(ExprFn::parse("50"), ExprFn::parse("0"));
  CHECK_THROWS_AS(integrate_spin(conn, SpinElement(), grid, {1, 1}), SpinDrift);
}

TEST_CASE("cubic segment rule integrates cubics exactly") {
  const double h = 0.25;
  for (std::size_t n : {3u, 4u, 5u, 9u}) {
    auto f = [&](std::size_t m) {
      const double x = static_cast<double>(m) * h;
      return n == 3 ? 1 + x - 3 * x * x : 1 + x - 3 * x * x + 2 * x * x * x;
    };
    auto F = [&](double x) {
      return n == 3 ? x + x * x / 2 - x * x * x : x + x * x / 2 - x * x * x + x * x * x * x / 2;
    };
    for (std::size_t m = 0; m + 1 < n; ++m) {
      const double exact = F(static_cast<double>(m + 1) * h) - F(static_cast<double>(m) * h);
      CHECK(segment_integral<double>(f, m, n, h, Quadrature::Cubic) ==
            doctest::Approx(exact).epsilon(1e-14));
    }
  }
}

TEST_CASE("trapezoid segment rule integrates linear functions exactly") {
  auto f = [](std::size_t m) { return 2.0 + 3.0 * static_cast<double>(m) * 0.1; };
  CHECK(segment_integral<double>(f, 2, 6, 0.1, Quadrature::Trapezoid) ==
        doctest::Approx(0.1 * 2.0 + 1.5 * (0.09 - 0.04)));
}

TEST_CASE("xi is real and the worked example closes") {
  const GridDomain grid = square(101);
  const Pipeline p = run_pipeline(grid, "1", "0", "1", "1");
  CHECK(p.xi.max_reality_residual < 1e-12);
  CHECK(p.closed.closedness_residual <= p.closed.closedness_tolerance);
  CHECK(p.closed.path_discrepancy <= 10 * grid.h() * grid.h());
  CHECK(p.closed.mesh.F(50, 50) == MinkVec{});
}

TEST_CASE("xi at the base node is the coframe image of I and J") {
  // At g = 1: xi = w1 J + w2 K, read in R^{1,3} as (0, 0, w1, w2).
  const MinkVec v = xi_value(CQuat::one(), 0.25, -0.5);
  CHECK(euclid_norm(v - MinkVec{0, 0, 0.25, -0.5}) < 1e-15);
}

TEST_CASE("xi stays real for spin frames of large norm") {
  // exp(t I i) boosts by 2t; the phase of H(g,g) must not leak into xi.
  const CQuat g = exp_pure({0.0, i1 * 4.0, 0.0, 0.0}) * CQuat{1.0 + cplx(0, 3e-10), 0.0, 0.0, 0.0};
  const MinkVec v = xi_value(g, 1.0, 0.0);
  CHECK(std::isfinite(v.x0));
  CHECK(mink_norm(v) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("worked example matches its closed form up to a Lorentz motion") {
  const GridDomain grid = square(101);
  const Pipeline p = run_pipeline(grid, "1", "0", "1", "1");
  const Alignment a = align_lorentz(closed_form_points(grid), p.closed.mesh.F.data());
  CHECK(a.determined());
  CHECK(a.max_deviation <= 1e-6);
  CHECK(a.lorentz_defect <= 1e-6);
}

TEST_CASE("trapezoid quadrature is second order on the worked example") {
  auto gap = [&](std::size_t n) {
    const GridDomain g = square(n);
    const auto a = run_pipeline(g, "1", "0", "1", "1", Quadrature::Trapezoid).closed.mesh.F;
    const auto b = run_pipeline(g, "1", "0", "1", "1", Quadrature::Cubic).closed.mesh.F;
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, euclid_norm(a.data()[i] - b.data()[i]));
    return d;
  };
  CHECK(gap(51) / gap(101) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("constant xi integrates exactly") {
  const GridDomain grid(0, 1, 0, 2, 7, 5);
  XiField xi;
  xi.xi_x = GridField<MinkVec>(grid, MinkVec{0.5, 1, 0, 0});
  xi.xi_y = GridField<MinkVec>(grid, MinkVec{0, 0, 1, 0.25});
  const MinkVec F0{1, 2, 3, 4};
  const auto c = integrate_closed(xi, F0, grid, {2, 3});
  const double err = max_over(grid, [&](std::size_t j, std::size_t k) {
    const double dx = grid.x(j) - grid.x(2), dy = grid.y(k) - grid.y(3);
    const MinkVec want = F0 + dx * MinkVec{0.5, 1, 0, 0} + dy * MinkVec{0, 0, 1, 0.25};
    return euclid_norm(c.mesh.F(j, k) - want);
  });
  CHECK(err < 1e-14);
  CHECK(c.closedness_residual < 1e-14);
  CHECK(c.path_discrepancy < 1e-14);
}

TEST_CASE("non-closed xi is rejected") {
  const GridDomain grid(0, 1, 0, 1, 21, 21);
  XiField xi;
  xi.xi_x = sample(grid, [&](std::size_t, std::size_t k) { return MinkVec{0, grid.y(k), 0, 0}; });
  xi.xi_y = GridField<MinkVec>(grid, MinkVec{0, 0, 1, 0});
  CHECK_THROWS_AS(integrate_closed(xi, MinkVec{}, grid, {0, 0}), NotClosed);
}

TEST_CASE("mismatched spin and frame grids are rejected") {
  const GridDomain a = square(11), b = square(13);
  const auto spin = integrate_spin(
      ConnectionForm::from_functions([](cplx) { return std::pair<cplx, cplx>{1.0, 0.0}; }),
      SpinElement(), a, base_near_origin(a));
  const FrameField frame =
      make_frame(b, ExprFn::parse("1"), ExprFn::parse("0"), ExprFn::parse("1"), ExprFn::parse("1"));
  CHECK_THROWS_AS(build_xi(spin, frame), InvalidGrid);
}

TEST_CASE("holomorphy of Fx - i Fy") {
  const GridDomain grid = square(41);
  const auto harmonic = testing::mesh_from(grid, [](double x, double y) {
    return MinkVec{x, x * x - y * y, 2 * x * y, y};
  });
  for (double r : check_maximal_holomorphy(harmonic)) CHECK(r < 1e-10);
  const auto bent = testing::mesh_from(grid, [](double x, double y) {
    return MinkVec{0, x, y, x * x};
  });
  CHECK(check_maximal_holomorphy(bent)[3] == doctest::Approx(2.0));
}
