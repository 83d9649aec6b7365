#pragma once

#include <stdexcept>
#include <string>

namespace flagsim {

/// Base class for all contract violations raised by the library.
struct FlagsimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct NestingViolation : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct SignError : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct DegenerateGeometry : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct TooCoarse : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct StepTooLarge : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct MassMismatch : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct SignMismatch : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct NonMonotone : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct IncompatibleTangent : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct ConstraintViolation : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct LengthMismatch : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct ShapeMismatch : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct ParseError : FlagsimError {
    using FlagsimError::FlagsimError;
};
struct ValidationError : FlagsimError {
    using FlagsimError::FlagsimError;
};

}  // namespace flagsim
