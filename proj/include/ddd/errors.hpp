#pragma once

#include <stdexcept>
#include <string>

namespace ddd {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Tensor shapes or operator dimensions do not match. */
struct DimensionError : Error {
    using Error::Error;
};

/* An argument lies outside the mathematical domain of the operation. */
struct DomainError : Error {
    using Error::Error;
};

/* Invalid or inconsistent experiment configuration. */
struct ConfigError : Error {
    using Error::Error;
};

/* A reference computation (pinv, high-accuracy dual ascent) did not reach
 * its required tolerance.  Callers must fail loudly, never fall back. */
struct OracleFailure : Error {
    using Error::Error;
};

/* A stated precondition of an estimate is violated by the supplied data,
 * e.g. a +inf term inside a tail sum. */
struct PreconditionViolation : Error {
    using Error::Error;
};

} // namespace ddd
