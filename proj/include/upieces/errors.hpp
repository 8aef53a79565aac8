#pragma once

#include <stdexcept>
#include <string>

namespace upieces {

/// Base class of every error raised by the library. Each subclass
/// corresponds to one contract violation and carries a short message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define UPIECES_DEFINE_ERROR(Name)              \
  class Name : public Error {                   \
   public:                                      \
    explicit Name(const std::string& what)      \
        : Error(std::string(#Name ": ") + what) {} \
  }

UPIECES_DEFINE_ERROR(UnsupportedField);
UPIECES_DEFINE_ERROR(CharMismatch);
UPIECES_DEFINE_ERROR(DimensionMismatch);
UPIECES_DEFINE_ERROR(NotNilpotent);
UPIECES_DEFINE_ERROR(DegreeMismatch);
UPIECES_DEFINE_ERROR(NotInE3);
UPIECES_DEFINE_ERROR(NotPrimitive);
UPIECES_DEFINE_ERROR(NotCommuting);
UPIECES_DEFINE_ERROR(OddDimension);
UPIECES_DEFINE_ERROR(NotMMember);
UPIECES_DEFINE_ERROR(NotInL);
UPIECES_DEFINE_ERROR(NotInLprime);
UPIECES_DEFINE_ERROR(NotUnipotent);
UPIECES_DEFINE_ERROR(NotSpMember);
UPIECES_DEFINE_ERROR(InadmissibleLabel);
UPIECES_DEFINE_ERROR(IncompatibleQ);
UPIECES_DEFINE_ERROR(ScaleExceeded);
UPIECES_DEFINE_ERROR(RangeError);
UPIECES_DEFINE_ERROR(NonIntegralFit);
UPIECES_DEFINE_ERROR(InvalidInput);

#undef UPIECES_DEFINE_ERROR

/// Raised when an internal consistency assertion fails, i.e. a theorem the
/// library relies on was contradicted by a computation. Always a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void ensure(bool condition, const char* what) {
  if (!condition) throw InternalError(what);
}

}  // namespace upieces
