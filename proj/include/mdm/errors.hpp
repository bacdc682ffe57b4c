#pragma once
// errors.hpp - typed error hierarchy shared by the library and the CLI.
//
// Every failure the library can raise maps onto one of four kinds so the
// CLI can translate exceptions into stable exit codes:
//   validation        - malformed or out-of-contract input          (exit 2)
//   unsupported       - well-formed input outside a pricer's regime (exit 3)
//   invariant         - an internal guarantee failed; a bug         (exit 4)
// Verification *results* (a price vector failing the dynamic-pricing check)
// are ordinary return values, not exceptions; the CLI maps them to exit 1.

#include <stdexcept>
#include <string>

namespace mdm {

enum class ErrorKind {
    validation,   // bad input: parse errors, assumption violations, bad arguments
    unsupported,  // input violates the selected algorithm's regime preconditions
    invariant,    // internal consistency failure (overflow, broken postcondition)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class UnsupportedRegimeError : public Error {
public:
    explicit UnsupportedRegimeError(const std::string& what) : Error(ErrorKind::unsupported, what) {}
};

class InvariantError : public Error {
public:
    explicit InvariantError(const std::string& what) : Error(ErrorKind::invariant, what) {}
};

// Internal invariant check. These conditions are theorems about the inputs the
// caller already validated; a failure is always a bug, never a user error.
inline void require_invariant(bool cond, const std::string& what) {
    if (!cond) throw InvariantError(what);
}

inline void require_valid(bool cond, const std::string& what) {
    if (!cond) throw ValidationError(what);
}

}  // namespace mdm
