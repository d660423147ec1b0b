#include <doctest.h>

#include "spinflat/cquat.hpp"
#include "spinflat/errors.hpp"
#include "spinflat/grassmann.hpp"
#include "spinflat/spin.hpp"
#include "support.hpp"

using namespace spinflat;
using testing::Draw;

namespace {

constexpr int kCases = 20000;
const cplx i1{0.0, 1.0};

double dist(const CQuat& a, const CQuat& b) { return coeff_norm(a - b); }
double dist(const MinkVec& a, const MinkVec& b) { return euclid_norm(a - b); }
double dist(const Mat2C& a, const Mat2C& b) { return frob_norm(a - b); }
double dist(const Bivector& a, const Bivector& b) { return coeff_norm(a - b); }

}  // namespace

TEST_CASE("unit products follow the quaternion table") {
  const CQuat I = CQuat::unit_i(), J = CQuat::unit_j(), K = CQuat::unit_k(), one = CQuat::one();
  CHECK(I * J == K);
  CHECK(J * K == I);
  CHECK(K * I == J);
  CHECK(J * I == -K);
  CHECK(I * I == -one);
  CHECK(J * J == -one);
  CHECK(K * K == -one);
  CHECK(mul(I, J) == K);
}

TEST_CASE("involutions on a fixed element") {
  const CQuat q{cplx(1, 2), cplx(3, 4), cplx(5, 6), cplx(7, 8)};
  CHECK(bar(q) == CQuat{cplx(1, 2), cplx(-3, -4), cplx(-5, -6), cplx(-7, -8)});
  CHECK(hat(q) == CQuat{cplx(1, -2), cplx(3, -4), cplx(5, -6), cplx(7, -8)});
  CHECK(barhat(q) == CQuat{cplx(1, -2), cplx(-3, 4), cplx(-5, 6), cplx(-7, 8)});
  const Involutions inv = involutions(q);
  CHECK(inv.bar == bar(q));
  CHECK(inv.hat == hat(q));
  CHECK(inv.barhat == barhat(q));
  CHECK(h_form(q, q) == cplx(1, 2) * cplx(1, 2) + cplx(3, 4) * cplx(3, 4) +
                            cplx(5, 6) * cplx(5, 6) + cplx(7, 8) * cplx(7, 8));
}

TEST_CASE("array round trip keeps the coefficient order") {
  const CQuat q{cplx(1, 2), cplx(3, 4), cplx(5, 6), cplx(7, 8)};
  const std::array<double, 8> a = to_array(q);
  CHECK(a == std::array<double, 8>{1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(cquat_from_array(a) == q);
}

TEST_CASE("inverse of a null element throws") {
  const CQuat null{1.0, i1, 0.0, 0.0};
  CHECK(std::abs(h_form(null, null)) == 0.0);
  CHECK_THROWS_AS(inverse(null), NullElement);
  CHECK(dist(inverse(CQuat{2.0, 0.0, 0.0, 0.0}), CQuat{0.5, 0.0, 0.0, 0.0}) < 1e-15);
}

TEST_CASE("Minkowski embedding golden values") {
  const MinkVec v{1, 2, 3, 4};
  const CQuat q = mink_embed(v);
  CHECK(q == CQuat{i1, 2.0, 3.0, 4.0});
  CHECK(mink_norm(v) == doctest::Approx(-1 + 4 + 9 + 16));
  CHECK(mink_extract(q) == v);
  CHECK(mink_residual(CQuat{1.0, 0.0, 0.0, 0.0}) == 1.0);
  CHECK_THROWS_AS(mink_extract(CQuat{1.0, 0.0, 0.0, 0.0}), NotMinkowski);
  CHECK(barhat(q) == -q);
}

TEST_CASE("property: product is associative and bilinear") {
  Draw d(1);
  double assoc = 0, distrib = 0;
  for (int n = 0; n < kCases; ++n) {
    const CQuat a = d.cquat(), b = d.cquat(), c = d.cquat();
    const cplx s = d.complex();
    assoc = std::max(assoc, dist((a * b) * c, a * (b * c)));
    distrib = std::max(distrib, dist(a * (b + s * c), a * b + s * (a * c)));
  }
  CHECK(assoc < 1e-13);
  CHECK(distrib < 1e-13);
}

TEST_CASE("property: involution laws") {
  Draw d(2);
  double worst = 0;
  for (int n = 0; n < kCases; ++n) {
    const CQuat a = d.cquat(), b = d.cquat();
    worst = std::max(worst, dist(bar(a * b), bar(b) * bar(a)));
    worst = std::max(worst, dist(hat(a * b), hat(a) * hat(b)));
    worst = std::max(worst, dist(barhat(a * b), barhat(b) * barhat(a)));
    worst = std::max(worst, dist(bar(bar(a)), a));
    worst = std::max(worst, dist(hat(hat(a)), a));
    worst = std::max(worst, dist(barhat(a), hat(bar(a))));
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("property: H is multiplicative and q bar(q) = H(q,q)") {
  Draw d(3);
  double mult = 0, norm = 0, inv = 0;
  for (int n = 0; n < kCases; ++n) {
    const CQuat a = d.cquat(), b = d.cquat();
    mult = std::max(mult, std::abs(h_form(a * b, a * b) - h_form(a, a) * h_form(b, b)));
    norm = std::max(norm, dist(a * bar(a), h_form(a, a) * CQuat::one()));
    if (std::abs(h_form(a, a)) > 0.1) inv = std::max(inv, dist(a * inverse(a), CQuat::one()));
  }
  CHECK(mult < 1e-12);
  CHECK(norm < 1e-13);
  CHECK(inv < 1e-12);
}

TEST_CASE("property: embedding is an isometry onto the anti-barhat subspace") {
  Draw d(4);
  double iso = 0, fixed = 0, polar = 0;
  for (int n = 0; n < kCases; ++n) {
    const MinkVec v = d.mink(), w = d.mink();
    const CQuat q = mink_embed(v), p = mink_embed(w);
    iso = std::max(iso, std::abs(h_form(q, q) - mink_norm(v)));
    polar = std::max(polar, std::abs(h_form(q, p) - mink_dot(v, w)));
    fixed = std::max(fixed, dist(barhat(q), -q) + dist(mink_extract(q), v));
  }
  CHECK(iso < 1e-14);
  CHECK(polar < 1e-14);
  CHECK(fixed == 0.0);
}

TEST_CASE("Spin elements renormalize small drift and reject large drift") {
  const SpinElement exact(CQuat::one());
  CHECK(exact.drift() == 0.0);
  const SpinElement drifted(CQuat{1.0 + 1e-4, 0.0, 0.0, 0.0});
  CHECK(drifted.drift() == doctest::Approx(2e-4).epsilon(1e-3));
  CHECK(std::abs(h_form(drifted.value(), drifted.value()) - 1.0) < 1e-15);
  CHECK_THROWS_AS(SpinElement(CQuat{2.0, 0.0, 0.0, 0.0}), NotInSpin);
}

TEST_CASE("exp_pure golden values") {
  const CQuat e = exp_pure({0.0, 0.0, 0.0, 0.5});
  CHECK(dist(e, CQuat{std::cos(0.5), 0.0, 0.0, std::sin(0.5)}) < 1e-15);
  const CQuat boost = exp_pure({0.0, i1 * 0.3, 0.0, 0.0});
  CHECK(dist(boost, CQuat{std::cosh(0.3), i1 * std::sinh(0.3), 0.0, 0.0}) < 1e-15);
  CHECK(exp_pure({0.0, 0.0, 0.0, 0.0}) == CQuat::one());
  CHECK_THROWS_AS(exp_pure({1.0, 0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("rotation about the x1 axis") {
  // exp(t/2 I) rotates the (x2, x3) plane by t under v -> q v hat(q)^{-1}.
  const double t = 0.4;
  const SpinElement q(exp_pure({0.0, t / 2, 0.0, 0.0}));
  const MinkVec v = act_vector(q, {0, 0, 1, 0});
  CHECK(dist(v, MinkVec{0, 0, std::cos(t), std::sin(t)}) < 1e-15);
}

TEST_CASE("property: Spin acts by Lorentz transformations with kernel +-1") {
  Draw d(5);
  double metric = 0, hom = 0, sign = 0;
  for (int n = 0; n < kCases; ++n) {
    const SpinElement a = d.spin(), b = d.spin();
    const MinkVec v = d.mink(), w = d.mink();
    const MinkVec av = act_vector(a, v), aw = act_vector(a, w);
    metric = std::max(metric, std::abs(mink_dot(av, aw) - mink_dot(v, w)) /
                                  (1 + euclid_norm(av) * euclid_norm(aw)));
    hom = std::max(hom, dist(act_vector(a * b, v), act_vector(a, act_vector(b, v))) /
                            (1 + euclid_norm(av)));
    sign = std::max(sign, dist(act_vector(SpinElement(-a.value()), v), av) / (1 + euclid_norm(av)));
  }
  CHECK(metric < 1e-12);
  CHECK(hom < 1e-12);
  CHECK(sign < 1e-12);
}

TEST_CASE("property: only +-1 act trivially") {
  // A nontrivial element moves at least one basis vector; the minimal
  // displacement grows with the distance from {1, -1}.
  Draw d(6);
  const MinkVec basis[4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  int trivial_identity = 0, misses = 0;
  for (int n = 0; n < 2000; ++n) {
    const SpinElement q = d.spin();
    double moved = 0;
    for (const auto& e : basis) moved = std::max(moved, dist(act_vector(q, e), e));
    const double away = std::min(dist(q.value(), CQuat::one()), dist(q.value(), -CQuat::one()));
    if (away > 1e-3 && moved < 1e-9) ++misses;
  }
  for (const CQuat& q : {CQuat::one(), -CQuat::one()}) {
    double moved = 0;
    for (const auto& e : basis) moved = std::max(moved, dist(act_vector(SpinElement(q), e), e));
    if (moved == 0.0) ++trivial_identity;
  }
  CHECK(trivial_identity == 2);
  CHECK(misses == 0);
}

TEST_CASE("matrix representation golden values") {
  CHECK(to_mat2(CQuat::one()) == Mat2C::identity());
  CHECK(to_mat2(CQuat::unit_i()) == Mat2C{i1, 0.0, 0.0, -i1});
  CHECK(to_mat2(CQuat::unit_j()) == Mat2C{0.0, 1.0, -1.0, 0.0});
  CHECK(to_mat2(CQuat::unit_k()) == Mat2C{0.0, i1, i1, 0.0});
}

TEST_CASE("property: H^C is isomorphic to M_2(C)") {
  Draw d(7);
  double hom = 0, det = 0, round = 0, star = 0;
  for (int n = 0; n < kCases; ++n) {
    const CQuat a = d.cquat(), b = d.cquat();
    const Mat2C A = to_mat2(a);
    hom = std::max(hom, dist(to_mat2(a * b), A * to_mat2(b)));
    det = std::max(det, std::abs(A.det() - h_form(a, a)));
    round = std::max(round, dist(from_mat2(A), a));
    // Conjugate transpose corresponds to barhat.
    star = std::max(star, dist(to_mat2(barhat(a)), A.adjoint()));
  }
  CHECK(hom < 1e-13);
  CHECK(det < 1e-13);
  CHECK(round < 1e-15);
  CHECK(star == 0.0);
}

TEST_CASE("Gauss map of the coordinate planes") {
  const MinkVec e1{0, 1, 0, 0}, e2{0, 0, 1, 0}, e3{0, 0, 0, 1}, e0{1, 0, 0, 0};
  CHECK(dist(gauss_from_frame(e2, e3), Bivector::e1()) < 1e-15);
  CHECK(dist(gauss_from_frame(e3, e1), Bivector::e2()) < 1e-15);
  CHECK(dist(gauss_from_frame(e1, e2), Bivector::e3()) < 1e-15);
  // A plane containing the time direction is not spacelike.
  CHECK_THROWS_AS(gauss_from_frame(e0, e1), NotOrthonormal);
  CHECK_THROWS_AS(gauss_from_frame(e1, 2.0 * e2), NotOrthonormal);
}

TEST_CASE("property: Gauss map lands on Q and changes sign with orientation") {
  Draw d(8);
  double on_q = 0, flip = 0;
  const MinkVec u{0, 0, 1, 0}, v{0, 0, 0, 1};
  for (int n = 0; n < kCases / 4; ++n) {
    const SpinElement q = d.spin(0.7);
    const MinkVec a = act_vector(q, u), b = act_vector(q, v);
    const Bivector G = gauss_from_frame(a, b);
    on_q = std::max(on_q, std::abs(h_form(G, G) - 1.0));
    flip = std::max(flip, dist(gauss_from_frame(b, a), -G));
  }
  CHECK(on_q < 1e-10);
  CHECK(flip < 1e-10);
}

TEST_CASE("cross product and complex volume form") {
  const Bivector E1 = Bivector::e1(), E2 = Bivector::e2(), E3 = Bivector::e3();
  CHECK(dist(cross(E1, E2), E3) < 1e-15);
  CHECK(mixed(E1, E2, E3) == cplx(1.0));
  CHECK(mixed(E2, E1, E3) == cplx(-1.0));
  // At p = E1 the tangent space is spanned by E2, E3.
  CHECK(area_form(E1, E2, E3) == cplx(1.0));
  CHECK(area_form(E1, i1 * E2, E3) == i1);
  CHECK_THROWS_AS(area_form(2.0 * E1, E2, E3), NotOnGrassmannian);
}

TEST_CASE("property: complex volume form is alternating and trilinear") {
  Draw d(9);
  double alt = 0, lin = 0;
  for (int n = 0; n < kCases / 4; ++n) {
    const Bivector a{d.complex(), d.complex(), d.complex()};
    const Bivector b{d.complex(), d.complex(), d.complex()};
    const Bivector c{d.complex(), d.complex(), d.complex()};
    const cplx s = d.complex();
    alt = std::max(alt, std::abs(mixed(a, b, c) + mixed(b, a, c)));
    alt = std::max(alt, std::abs(mixed(a, b, c) - mixed(b, c, a)));
    lin = std::max(lin, std::abs(mixed(a + s * b, b, c) - mixed(a, b, c)));
  }
  CHECK(alt < 1e-14);
  CHECK(lin < 1e-14);
}
