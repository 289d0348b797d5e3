#pragma once

#include <stdexcept>
#include <string>

namespace wittlab {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define WITTLAB_ERROR(Name)                                                   \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}  \
    };

WITTLAB_ERROR(InvalidArgument)
WITTLAB_ERROR(IntegralityFailure)
WITTLAB_ERROR(SizeLimitExceeded)
WITTLAB_ERROR(CongruenceFailure)
WITTLAB_ERROR(PrecisionExhausted)
WITTLAB_ERROR(MissingAssignment)
WITTLAB_ERROR(NonEisenstein)
WITTLAB_ERROR(NotDivisible)
WITTLAB_ERROR(NotUnit)
WITTLAB_ERROR(RingMismatch)
WITTLAB_ERROR(TooShort)
WITTLAB_ERROR(NotGaloisStable)
WITTLAB_ERROR(NonIntegralResult)
WITTLAB_ERROR(PrecisionNotReached)
WITTLAB_ERROR(TailNotCertified)
WITTLAB_ERROR(SeedNotConverging)
WITTLAB_ERROR(SnapAmbiguous)
WITTLAB_ERROR(ReportedMismatch)
WITTLAB_ERROR(TruncationTooSmall)
WITTLAB_ERROR(NoConventionMatches)

#undef WITTLAB_ERROR

}  // namespace wittlab
