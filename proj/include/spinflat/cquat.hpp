#pragma once

// Complex quaternions H^C = { q0 + q1 I + q2 J + q3 K : q_k in C } with
// I^2 = J^2 = K^2 = -1, IJ = -JI = K, JK = -KJ = I, KI = -IK = J.
//
// Conventions used project-wide:
//   bar(q)    = q0 - q1 I - q2 J - q3 K          (anti-automorphism)
//   hat(q)    = conj(q0) + conj(q1) I + ...       (automorphism)
//   barhat(q) = bar(hat(q))                       (anti-automorphism)
//   H(a, b)   = a0 b0 + a1 b1 + a2 b2 + a3 b3     (C-bilinear, no conjugation)
// Minkowski space R^{1,3} sits inside H^C as { q : barhat(q) = -q }, i.e.
// (x0, x1, x2, x3) <-> i x0 + x1 I + x2 J + x3 K.

#include <array>
#include <complex>

namespace spinflat {

using cplx = std::complex<double>;

struct CQuat {
  cplx q0{}, q1{}, q2{}, q3{};

  static constexpr CQuat one() { return {1.0, 0.0, 0.0, 0.0}; }
  static constexpr CQuat unit_i() { return {0.0, 1.0, 0.0, 0.0}; }
  static constexpr CQuat unit_j() { return {0.0, 0.0, 1.0, 0.0}; }
  static constexpr CQuat unit_k() { return {0.0, 0.0, 0.0, 1.0}; }

  cplx& operator[](int k) { return k == 0 ? q0 : k == 1 ? q1 : k == 2 ? q2 : q3; }
  const cplx& operator[](int k) const { return k == 0 ? q0 : k == 1 ? q1 : k == 2 ? q2 : q3; }

  CQuat& operator+=(const CQuat& o) {
    q0 += o.q0; q1 += o.q1; q2 += o.q2; q3 += o.q3;
    return *this;
  }
  CQuat& operator-=(const CQuat& o) {
    q0 -= o.q0; q1 -= o.q1; q2 -= o.q2; q3 -= o.q3;
    return *this;
  }
  CQuat& operator*=(cplx s) {
    q0 *= s; q1 *= s; q2 *= s; q3 *= s;
    return *this;
  }

  friend CQuat operator+(CQuat a, const CQuat& b) { return a += b; }
  friend CQuat operator-(CQuat a, const CQuat& b) { return a -= b; }
  friend CQuat operator-(const CQuat& a) { return {-a.q0, -a.q1, -a.q2, -a.q3}; }
  friend CQuat operator*(cplx s, CQuat a) { return a *= s; }
  friend CQuat operator*(CQuat a, cplx s) { return a *= s; }
  friend CQuat operator*(double s, CQuat a) { return a *= s; }
  friend CQuat operator*(CQuat a, double s) { return a *= s; }
  friend CQuat operator/(CQuat a, cplx s) { return a *= (1.0 / s); }
  friend bool operator==(const CQuat&, const CQuat&) = default;

  // Quaternion product with complex coefficients.
  friend CQuat operator*(const CQuat& a, const CQuat& b) {
    return {a.q0 * b.q0 - a.q1 * b.q1 - a.q2 * b.q2 - a.q3 * b.q3,
            a.q0 * b.q1 + a.q1 * b.q0 + a.q2 * b.q3 - a.q3 * b.q2,
            a.q0 * b.q2 - a.q1 * b.q3 + a.q2 * b.q0 + a.q3 * b.q1,
            a.q0 * b.q3 + a.q1 * b.q2 - a.q2 * b.q1 + a.q3 * b.q0};
  }
};

CQuat mul(const CQuat& a, const CQuat& b);
CQuat bar(const CQuat& q);
CQuat hat(const CQuat& q);
CQuat barhat(const CQuat& q);

struct Involutions {
  CQuat bar, hat, barhat;
};
Involutions involutions(const CQuat& q);

cplx h_form(const CQuat& a, const CQuat& b);

// bar(q) / H(q,q). Throws NullElement when |H(q,q)| <= tol_null.
CQuat inverse(const CQuat& q);

// Euclidean norm of the 8 real coefficients; used for residuals only.
double coeff_norm(const CQuat& q);

// [Re q0, Im q0, ..., Re q3, Im q3]
std::array<double, 8> to_array(const CQuat& q);
CQuat cquat_from_array(const std::array<double, 8>& a);

struct MinkVec {
  double x0 = 0, x1 = 0, x2 = 0, x3 = 0;

  double& operator[](int k) { return k == 0 ? x0 : k == 1 ? x1 : k == 2 ? x2 : x3; }
  double operator[](int k) const { return k == 0 ? x0 : k == 1 ? x1 : k == 2 ? x2 : x3; }

  MinkVec& operator+=(const MinkVec& o) {
    x0 += o.x0; x1 += o.x1; x2 += o.x2; x3 += o.x3;
    return *this;
  }
  MinkVec& operator-=(const MinkVec& o) {
    x0 -= o.x0; x1 -= o.x1; x2 -= o.x2; x3 -= o.x3;
    return *this;
  }
  MinkVec& operator*=(double s) {
    x0 *= s; x1 *= s; x2 *= s; x3 *= s;
    return *this;
  }
  friend MinkVec operator+(MinkVec a, const MinkVec& b) { return a += b; }
  friend MinkVec operator-(MinkVec a, const MinkVec& b) { return a -= b; }
  friend MinkVec operator-(const MinkVec& a) { return {-a.x0, -a.x1, -a.x2, -a.x3}; }
  friend MinkVec operator*(double s, MinkVec a) { return a *= s; }
  friend MinkVec operator*(MinkVec a, double s) { return a *= s; }
  friend MinkVec operator/(MinkVec a, double s) { return a *= (1.0 / s); }
  friend bool operator==(const MinkVec&, const MinkVec&) = default;
};

// -a0 b0 + a1 b1 + a2 b2 + a3 b3
double mink_dot(const MinkVec& a, const MinkVec& b);
double mink_norm(const MinkVec& v);
double euclid_norm(const MinkVec& v);

CQuat mink_embed(const MinkVec& v);
// Distance of q from the real span of {i 1, I, J, K}.
double mink_residual(const CQuat& q);
// Throws NotMinkowski when mink_residual(q) > tol_real.
MinkVec mink_extract(const CQuat& q);

}  // namespace spinflat
