#include "spinflat/grassmann.hpp"

#include <cmath>
#include <sstream>

#include "spinflat/errors.hpp"
#include "spinflat/tolerances.hpp"

namespace spinflat {

cplx h_form(const Bivector& a, const Bivector& b) {
  return a.z1 * b.z1 + a.z2 * b.z2 + a.z3 * b.z3;
}

double coeff_norm(const Bivector& b) {
  return std::sqrt(std::norm(b.z1) + std::norm(b.z2) + std::norm(b.z3));
}

std::array<double, 6> to_array(const Bivector& b) {
  return {b.z1.real(), b.z1.imag(), b.z2.real(), b.z2.imag(), b.z3.real(), b.z3.imag()};
}

Bivector gauss_from_frame(const MinkVec& v1, const MinkVec& v2) {
  const double tol = tolerances().frame;
  const double n1 = mink_norm(v1);
  const double n2 = mink_norm(v2);
  const double d12 = mink_dot(v1, v2);
  if (std::abs(n1 - 1.0) > tol || std::abs(n2 - 1.0) > tol || std::abs(d12) > tol) {
    std::ostringstream os;
    os << "frame is not orthonormal spacelike: <v1,v1> = " << n1 << ", <v2,v2> = " << n2
       << ", <v1,v2> = " << d12;
    throw NotOrthonormal(os.str());
  }
  return Bivector::from_cquat(mink_embed(v1) * hat(mink_embed(v2)));
}

Bivector cross(const Bivector& a, const Bivector& b) {
  const CQuat qa = a.as_cquat();
  const CQuat qb = b.as_cquat();
  return Bivector::from_cquat(0.5 * (qa * qb - qb * qa));
}

cplx mixed(const Bivector& a, const Bivector& b, const Bivector& c) {
  return h_form(cross(a, b), c);
}

cplx area_form(const Bivector& p, const Bivector& u, const Bivector& v) {
  const Tolerances& tol = tolerances();
  const cplx hp = h_form(p, p);
  if (!(std::abs(hp - 1.0) <= tol.spin)) {
    std::ostringstream os;
    os << "base point has H(p,p) = " << hp;
    throw NotOnGrassmannian(os.str());
  }
  const double tu = std::abs(h_form(p, u));
  const double tv = std::abs(h_form(p, v));
  if (tu > tol.tangency || tv > tol.tangency) {
    std::ostringstream os;
    os << "arguments not tangent to Q: |H(p,u)| = " << tu << ", |H(p,v)| = " << tv;
    warn("NotTangent", os.str());
  }
  return mixed(u, v, p);
}

}  // namespace spinflat
