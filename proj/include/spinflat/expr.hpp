#pragma once

// Infix expressions over the variables x, y (real) and z = x + i y, used to
// supply holomorphic data (f1, f2, psi, theta, omega) and smooth real data
// (h0, h1). Standard precedence; '^' (or '**') is right associative and binds
// tighter than unary minus.
//
//   constants: i, pi, e, numbers (123, 1.5, 2e-3)
//   functions: exp log sqrt sin cos tan sinh cosh tanh conj re im abs

#include <memory>
#include <string>
#include <string_view>

#include "spinflat/cquat.hpp"

namespace spinflat {

class ExprFn {
 public:
  // Throws ExprError carrying the character offset of the problem.
  static ExprFn parse(std::string_view source);

  // Value at the point z = x + i y. Throws ExprError if the result is not finite.
  cplx operator()(cplx z) const;
  // Value that must be real: throws ExprError when |Im| > 1e-12 max(1, |Re|).
  double real(double x, double y) const;

  const std::string& source() const;

  struct Program;

 private:
  std::shared_ptr<const Program> program_;
};

}  // namespace spinflat
