#pragma once

#include <stdexcept>
#include <string>

namespace phasespace {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PHASESPACE_DEFINE_ERROR(Name)      \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

PHASESPACE_DEFINE_ERROR(ParameterError);
PHASESPACE_DEFINE_ERROR(TruncationError);
PHASESPACE_DEFINE_ERROR(ResolutionError);
PHASESPACE_DEFINE_ERROR(NonConvergence);
PHASESPACE_DEFINE_ERROR(RangeError);
PHASESPACE_DEFINE_ERROR(OverflowError);
PHASESPACE_DEFINE_ERROR(NoRegularFormError);
PHASESPACE_DEFINE_ERROR(DivergenceError);
PHASESPACE_DEFINE_ERROR(UnsupportedError);
PHASESPACE_DEFINE_ERROR(SupportError);
PHASESPACE_DEFINE_ERROR(ComplexResidueError);

#undef PHASESPACE_DEFINE_ERROR

}  // namespace phasespace
