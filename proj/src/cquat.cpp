#include "spinflat/cquat.hpp"

#include <cmath>
#include <sstream>

#include "spinflat/errors.hpp"
#include "spinflat/tolerances.hpp"

namespace spinflat {

CQuat mul(const CQuat& a, const CQuat& b) { return a * b; }

CQuat bar(const CQuat& q) { return {q.q0, -q.q1, -q.q2, -q.q3}; }

CQuat hat(const CQuat& q) {
  return {std::conj(q.q0), std::conj(q.q1), std::conj(q.q2), std::conj(q.q3)};
}

CQuat barhat(const CQuat& q) { return bar(hat(q)); }

Involutions involutions(const CQuat& q) { return {bar(q), hat(q), barhat(q)}; }

cplx h_form(const CQuat& a, const CQuat& b) {
  return a.q0 * b.q0 + a.q1 * b.q1 + a.q2 * b.q2 + a.q3 * b.q3;
}

CQuat inverse(const CQuat& q) {
  const cplx n = h_form(q, q);
  if (std::abs(n) <= tolerances().null) {
    std::ostringstream os;
    os << "element with H(q,q) = " << n << " is not invertible";
    throw NullElement(os.str());
  }
  return bar(q) / n;
}

double coeff_norm(const CQuat& q) {
  return std::sqrt(std::norm(q.q0) + std::norm(q.q1) + std::norm(q.q2) + std::norm(q.q3));
}

std::array<double, 8> to_array(const CQuat& q) {
  return {q.q0.real(), q.q0.imag(), q.q1.real(), q.q1.imag(),
          q.q2.real(), q.q2.imag(), q.q3.real(), q.q3.imag()};
}

CQuat cquat_from_array(const std::array<double, 8>& a) {
  return {{a[0], a[1]}, {a[2], a[3]}, {a[4], a[5]}, {a[6], a[7]}};
}

double mink_dot(const MinkVec& a, const MinkVec& b) {
  return -a.x0 * b.x0 + a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3;
}

double mink_norm(const MinkVec& v) { return mink_dot(v, v); }

double euclid_norm(const MinkVec& v) {
  return std::sqrt(v.x0 * v.x0 + v.x1 * v.x1 + v.x2 * v.x2 + v.x3 * v.x3);
}

CQuat mink_embed(const MinkVec& v) {
  return {cplx(0.0, v.x0), cplx(v.x1, 0.0), cplx(v.x2, 0.0), cplx(v.x3, 0.0)};
}

double mink_residual(const CQuat& q) {
  return std::sqrt(q.q0.real() * q.q0.real() + q.q1.imag() * q.q1.imag() +
                   q.q2.imag() * q.q2.imag() + q.q3.imag() * q.q3.imag());
}

MinkVec mink_extract(const CQuat& q) {
  const double r = mink_residual(q);
  if (!(r <= tolerances().real)) {
    std::ostringstream os;
    os << "quaternion is off the Minkowski subspace by " << r;
    throw NotMinkowski(os.str());
  }
  return {q.q0.imag(), q.q1.real(), q.q2.real(), q.q3.real()};
}

}  // namespace spinflat
