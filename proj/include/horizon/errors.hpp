#pragma once

#include <stdexcept>
#include <string>

namespace horizon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HORIZON_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  };

// 0^negative, negative^fractional, or a chart that cannot host a monomial.
HORIZON_DEFINE_ERROR(DomainError)
HORIZON_DEFINE_ERROR(NotAQHError)
HORIZON_DEFINE_ERROR(NoTypeFound)
HORIZON_DEFINE_ERROR(ConvergenceError)
HORIZON_DEFINE_ERROR(ChartDomainError)
HORIZON_DEFINE_ERROR(HorizonError)
HORIZON_DEFINE_ERROR(NegativeWExponentError)
HORIZON_DEFINE_ERROR(AlreadyExtendedError)
HORIZON_DEFINE_ERROR(StepFailure)
HORIZON_DEFINE_ERROR(EigenFailure)
HORIZON_DEFINE_ERROR(CurveBreak)
HORIZON_DEFINE_ERROR(InsufficientWindow)
HORIZON_DEFINE_ERROR(NotConverged)
HORIZON_DEFINE_ERROR(VanishingComponent)
HORIZON_DEFINE_ERROR(NoTargetFound)
HORIZON_DEFINE_ERROR(UnknownExample)

#undef HORIZON_DEFINE_ERROR

/// Configuration error carrying the JSON pointer of the offending value.
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : Error(pointer.empty() ? what : pointer + ": " + what), pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace horizon
