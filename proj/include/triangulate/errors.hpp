#ifndef TRIANGULATE_ERRORS_HPP
#define TRIANGULATE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace triangulate {

// Base of every library error. InputError marks a rejected input
// (caller can fix it); NumericError marks a computation that cannot
// proceed with these values (singular system, zero denominator, ...).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct InvalidParam final : InputError {
    using InputError::InputError;
};

struct InvalidWeights final : InputError {
    using InputError::InputError;
};

struct ZeroDenominator final : NumericError {
    using NumericError::NumericError;
};

struct SingularCovariance final : NumericError {
    using NumericError::NumericError;
};

// Thrown when observed weights sit on (or outside) the boundary of the
// invertible region; the message names the degenerate limit implied.
struct InfeasibleWeights final : InputError {
    using InputError::InputError;
};

struct EmptyTable final : InputError {
    using InputError::InputError;
};

struct DegenerateDenominator final : NumericError {
    using NumericError::NumericError;
};

struct LengthMismatch final : InputError {
    using InputError::InputError;
};

struct RankDeficient final : NumericError {
    using NumericError::NumericError;
};

struct TooFewRows final : InputError {
    using InputError::InputError;
};

struct LambdaOutOfRange final : InputError {
    using InputError::InputError;
};

struct EmptySample final : InputError {
    using InputError::InputError;
};

struct NotPSD final : NumericError {
    using NumericError::NumericError;
};

}  // namespace triangulate

#endif
