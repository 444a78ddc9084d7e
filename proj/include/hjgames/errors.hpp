#pragma once

#include <stdexcept>
#include <string>

namespace hjgames {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A symmetric weight matrix failed its positive-definiteness check.
struct NotPositiveDefinite : Error {
    using Error::Error;
};

/// The saddle-point linear system could not be solved.
struct SingularSystem : Error {
    using Error::Error;
};

/// Exponent pair outside the admissible range (e.g. sigma >= rho).
struct InvalidExponents : Error {
    using Error::Error;
};

/// A denominator of the compatibility inequalities is non-positive.
struct DegenerateExponents : Error {
    using Error::Error;
};

/// A user-supplied dynamics/cost callback returned a non-finite value.
struct NonFiniteEvaluation : Error {
    using Error::Error;
};

/// A state integration produced a non-finite state (blow-up suspected).
struct NonFiniteState : Error {
    using Error::Error;
};

/// Requested evaluation time precedes the blow-up horizon.
struct OutsideValidityWindow : Error {
    using Error::Error;
};

/// A quadratic control weight is not strictly positive.
struct NonPositiveWeights : Error {
    using Error::Error;
};

/// CFL-type stability restriction violated.
struct UnstableParameters : Error {
    using Error::Error;
};

/// The grid scheme produced a non-finite value.
struct NonFiniteValue : Error {
    using Error::Error;
};

/// The comparison harness observed an ordering violation.
struct OrderingViolated : Error {
    using Error::Error;
};

/// Too many optimizers landed on the control-grid boundary.
struct TruncationTooSmall : Error {
    using Error::Error;
};

/// Scenario file could not be parsed or failed schema validation.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace hjgames
