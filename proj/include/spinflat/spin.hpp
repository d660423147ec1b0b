#pragma once

// Spin(1,3) = { q in H^C : H(q,q) = 1 } acting on R^{1,3} by
// v -> q v hat(q)^{-1}, and the algebra isomorphism H^C -> M_2(C).

#include <array>

#include "spinflat/cquat.hpp"

namespace spinflat {

class SpinElement {
 public:
  SpinElement() = default;

  // Accepts q when |H(q,q) - 1| <= tol_spin. Between tol_spin and 0.1 the
  // value is divided by the principal square root of H(q,q); beyond 0.1
  // NotInSpin is thrown.
  explicit SpinElement(const CQuat& q);

  const CQuat& value() const { return value_; }
  // |H(q,q) - 1| of the input before any renormalization.
  double drift() const { return drift_; }

  friend SpinElement operator*(const SpinElement& a, const SpinElement& b) {
    return SpinElement(a.value_ * b.value_);
  }

 private:
  CQuat value_ = CQuat::one();
  double drift_ = 0.0;
};

// q v hat(q)^{-1}
MinkVec act_vector(const SpinElement& q, const MinkVec& v);

// exp(a) for a = a1 I + a2 J + a3 K: cos(c) + sin(c)/c * a with
// c^2 = a1^2 + a2^2 + a3^2. Throws std::invalid_argument when a has a
// nonzero 1-component.
CQuat exp_pure(const CQuat& a);

struct Mat2C {
  cplx a11{1.0}, a12{}, a21{}, a22{1.0};

  static constexpr Mat2C identity() { return {1.0, 0.0, 0.0, 1.0}; }

  cplx det() const { return a11 * a22 - a12 * a21; }
  Mat2C adjoint() const {
    return {std::conj(a11), std::conj(a21), std::conj(a12), std::conj(a22)};
  }

  friend Mat2C operator*(const Mat2C& a, const Mat2C& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend Mat2C operator+(const Mat2C& a, const Mat2C& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
  }
  friend Mat2C operator-(const Mat2C& a, const Mat2C& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
  }
  friend Mat2C operator*(cplx s, const Mat2C& a) {
    return {s * a.a11, s * a.a12, s * a.a21, s * a.a22};
  }
  friend bool operator==(const Mat2C&, const Mat2C&) = default;
};

// Frobenius norm.
double frob_norm(const Mat2C& m);
// Row-major [Re a11, Im a11, Re a12, Im a12, ...]
std::array<double, 8> to_array(const Mat2C& m);

// A(q) = [[q0 + i q1, q2 + i q3], [-q2 + i q3, q0 - i q1]]
Mat2C to_mat2(const CQuat& q);
CQuat from_mat2(const Mat2C& m);

}  // namespace spinflat
