#pragma once

#include <stdexcept>
#include <string>

namespace spinflat {

// Base of every error raised by the library. `kind()` is the stable
// identifier that shows up in run reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SPINFLAT_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  };

SPINFLAT_DEFINE_ERROR(NullElement)
SPINFLAT_DEFINE_ERROR(NotMinkowski)
SPINFLAT_DEFINE_ERROR(NotInSpin)
SPINFLAT_DEFINE_ERROR(NotOrthonormal)
SPINFLAT_DEFINE_ERROR(NotOnGrassmannian)
SPINFLAT_DEFINE_ERROR(DegenerateOsculating)
SPINFLAT_DEFINE_ERROR(FrameDegenerate)
SPINFLAT_DEFINE_ERROR(FrameNonCommuting)
SPINFLAT_DEFINE_ERROR(SpinDrift)
SPINFLAT_DEFINE_ERROR(NotClosed)
SPINFLAT_DEFINE_ERROR(NotSpacelike)
SPINFLAT_DEFINE_ERROR(DegenerateNormal)
SPINFLAT_DEFINE_ERROR(DetDrift)
SPINFLAT_DEFINE_ERROR(NotImmersed)
SPINFLAT_DEFINE_ERROR(InvalidGrid)
SPINFLAT_DEFINE_ERROR(ConfigError)
SPINFLAT_DEFINE_ERROR(IOError)

#undef SPINFLAT_DEFINE_ERROR

// Expression parse/evaluation failure. `position` is a 0-based character
// offset into the source text (npos for evaluation-time errors).
class ExprError : public Error {
 public:
  ExprError(const std::string& what, std::size_t position)
      : Error("ExprError", what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace spinflat
