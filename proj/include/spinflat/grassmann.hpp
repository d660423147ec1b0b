#pragma once

// Bivectors of R^{1,3} as Z1 I + Z2 J + Z3 K (E1 = e2^e3 = I, E2 = e3^e1 = J,
// E3 = e1^e2 = K). The Grassmannian of oriented spacelike planes is
// Q = { Z1^2 + Z2^2 + Z3^2 = 1 }. The complex structure of Lambda^2 is plain
// multiplication of (Z1, Z2, Z3) by i.

#include <array>

#include "spinflat/cquat.hpp"

namespace spinflat {

struct Bivector {
  cplx z1{}, z2{}, z3{};

  static constexpr Bivector e1() { return {1.0, 0.0, 0.0}; }
  static constexpr Bivector e2() { return {0.0, 1.0, 0.0}; }
  static constexpr Bivector e3() { return {0.0, 0.0, 1.0}; }

  CQuat as_cquat() const { return {0.0, z1, z2, z3}; }
  // Drops the scalar part of q.
  static Bivector from_cquat(const CQuat& q) { return {q.q1, q.q2, q.q3}; }

  Bivector& operator+=(const Bivector& o) {
    z1 += o.z1; z2 += o.z2; z3 += o.z3;
    return *this;
  }
  Bivector& operator-=(const Bivector& o) {
    z1 -= o.z1; z2 -= o.z2; z3 -= o.z3;
    return *this;
  }
  Bivector& operator*=(cplx s) {
    z1 *= s; z2 *= s; z3 *= s;
    return *this;
  }
  friend Bivector operator+(Bivector a, const Bivector& b) { return a += b; }
  friend Bivector operator-(Bivector a, const Bivector& b) { return a -= b; }
  friend Bivector operator-(const Bivector& a) { return {-a.z1, -a.z2, -a.z3}; }
  friend Bivector operator*(cplx s, Bivector a) { return a *= s; }
  friend Bivector operator*(Bivector a, cplx s) { return a *= s; }
  friend Bivector operator*(double s, Bivector a) { return a *= cplx(s); }
  friend Bivector operator*(Bivector a, double s) { return a *= cplx(s); }
  friend Bivector operator/(Bivector a, double s) { return a *= cplx(1.0 / s); }
  friend bool operator==(const Bivector&, const Bivector&) = default;
};

cplx h_form(const Bivector& a, const Bivector& b);
double coeff_norm(const Bivector& b);
std::array<double, 6> to_array(const Bivector& b);

// v1 . hat(v2) for an orthonormal spacelike pair; throws NotOrthonormal.
Bivector gauss_from_frame(const MinkVec& v1, const MinkVec& v2);

// (a b - b a) / 2
Bivector cross(const Bivector& a, const Bivector& b);

// H(a x b, c), the complex volume form.
cplx mixed(const Bivector& a, const Bivector& b, const Bivector& c);

// omega_Q at p: mixed(u, v, p). Throws NotOnGrassmannian when
// |H(p,p) - 1| > tol_spin; warns when u or v is not tangent at p.
cplx area_form(const Bivector& p, const Bivector& u, const Bivector& v);

}  // namespace spinflat
