#pragma once

#include <stdexcept>
#include <string>

namespace arpbo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ARPBO_DEFINE_ERROR(Name)       \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

ARPBO_DEFINE_ERROR(ValidationError);     // value outside its parameter's domain
ARPBO_DEFINE_ERROR(ShapeError);          // dimension mismatch
ARPBO_DEFINE_ERROR(ConfigError);         // malformed space or optimizer config
ARPBO_DEFINE_ERROR(InputError);          // non-finite or otherwise unusable data
ARPBO_DEFINE_ERROR(NumericalError);      // factorization failure
ARPBO_DEFINE_ERROR(ProtocolError);       // ask/tell ordering violated
ARPBO_DEFINE_ERROR(DegenerateError);     // clustering on identical values
ARPBO_DEFINE_ERROR(InvalidLabelsError);  // classifier trained on one class
ARPBO_DEFINE_ERROR(ContractError);       // caller broke a documented precondition
ARPBO_DEFINE_ERROR(EmptyHistoryError);
ARPBO_DEFINE_ERROR(UndefinedScoreError);
ARPBO_DEFINE_ERROR(UnsupportedDimensionError);

#undef ARPBO_DEFINE_ERROR

}  // namespace arpbo
