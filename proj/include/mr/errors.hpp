#pragma once

#include <stdexcept>
#include <string>

namespace mr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define MR_DEFINE_ERROR(Name)                 \
  struct Name : Error {                       \
    using Error::Error;                       \
  }

// problems
MR_DEFINE_ERROR(NonPositiveEigenvalue);
MR_DEFINE_ERROR(NotSymmetric);
MR_DEFINE_ERROR(RangeViolation);
MR_DEFINE_ERROR(RankDeficient);
MR_DEFINE_ERROR(NoConvergence);
// prox
MR_DEFINE_ERROR(InvalidStep);
// solver
MR_DEFINE_ERROR(StepTooLarge);
MR_DEFINE_ERROR(NonFiniteIterate);
// analysis
MR_DEFINE_ERROR(MissingReference);
MR_DEFINE_ERROR(NonPositiveValue);
MR_DEFINE_ERROR(NoRoot);
// bessel
MR_DEFINE_ERROR(NegativeArgument);
// ode
MR_DEFINE_ERROR(NonPositiveLambda);
MR_DEFINE_ERROR(NoSignChange);
MR_DEFINE_ERROR(ZeroInitialPoint);
MR_DEFINE_ERROR(NonFiniteState);

#undef MR_DEFINE_ERROR

}  // namespace mr
