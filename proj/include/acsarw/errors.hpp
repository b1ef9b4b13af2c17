#pragma once

#include <stdexcept>
#include <string>

namespace acsarw {

// Base of everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller misuse: mixed field contexts, dimension mismatches, asking a dropout
// server to answer or accept an update, indices out of range.
struct UsageError : Error {
    using Error::Error;
};

// Invalid or infeasible external input: threshold constraint violations,
// field too small, malformed JSON, infeasible dropout sets.
struct ConfigError : Error {
    using Error::Error;
};

// A legitimately impossible algebraic request from the caller: inverse of
// zero, solving a singular user-supplied system.
struct SingularError : Error {
    using Error::Error;
};

// Something the scheme guarantees failed anyway (a Cauchy-Vandermonde system
// came out singular, an oracle cross-check mismatched). Indicates a bug, not
// bad input.
struct InvariantError : Error {
    using Error::Error;
};

// An exhaustive enumeration would exceed the configured budget.
struct BudgetError : Error {
    using Error::Error;
};

} // namespace acsarw
