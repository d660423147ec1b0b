#include "spinflat/spin.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spinflat/errors.hpp"
#include "spinflat/tolerances.hpp"

namespace spinflat {

SpinElement::SpinElement(const CQuat& q) : value_(q) {
  const cplx n = h_form(q, q);
  drift_ = std::abs(n - 1.0);
  if (!(drift_ <= 0.1)) {
    std::ostringstream os;
    os << "H(q,q) = " << n << " is too far from 1 for Spin(1,3)";
    throw NotInSpin(os.str());
  }
  if (drift_ > tolerances().spin) {
    value_ = q / std::sqrt(n);
  }
}

MinkVec act_vector(const SpinElement& q, const MinkVec& v) {
  const CQuat& g = q.value();
  return mink_extract(g * mink_embed(v) * inverse(hat(g)));
}

CQuat exp_pure(const CQuat& a) {
  if (a.q0 != cplx{}) {
    throw std::invalid_argument("exp_pure: argument has a nonzero scalar part");
  }
  const cplx c2 = a.q1 * a.q1 + a.q2 * a.q2 + a.q3 * a.q3;
  cplx cosc, sinc;
  if (std::abs(c2) < 1e-6) {
    // cos and sin(c)/c are even in c, so both are series in c^2
    cosc = 1.0 - c2 / 2.0 + c2 * c2 / 24.0 - c2 * c2 * c2 / 720.0;
    sinc = 1.0 - c2 / 6.0 + c2 * c2 / 120.0 - c2 * c2 * c2 / 5040.0;
  } else {
    const cplx c = std::sqrt(c2);
    cosc = std::cos(c);
    sinc = std::sin(c) / c;
  }
  return CQuat{cosc, 0.0, 0.0, 0.0} + sinc * a;
}

double frob_norm(const Mat2C& m) {
  return std::sqrt(std::norm(m.a11) + std::norm(m.a12) + std::norm(m.a21) + std::norm(m.a22));
}

std::array<double, 8> to_array(const Mat2C& m) {
  return {m.a11.real(), m.a11.imag(), m.a12.real(), m.a12.imag(),
          m.a21.real(), m.a21.imag(), m.a22.real(), m.a22.imag()};
}

Mat2C to_mat2(const CQuat& q) {
  constexpr cplx i{0.0, 1.0};
  return {q.q0 + i * q.q1, q.q2 + i * q.q3, -q.q2 + i * q.q3, q.q0 - i * q.q1};
}

CQuat from_mat2(const Mat2C& m) {
  constexpr cplx i{0.0, 1.0};
  return {(m.a11 + m.a22) * 0.5, (m.a11 - m.a22) * (-0.5 * i),
          (m.a12 - m.a21) * 0.5, (m.a12 + m.a21) * (-0.5 * i)};
}

}  // namespace spinflat
