#pragma once

/**
 * @file error.hpp
 * @brief Error type shared by every lqdim module.
 *
 * All failures are reported by throwing lqdim::Error, tagged with an
 * ErrorKind. The command line front end maps kinds onto exit codes.
 */

#include <stdexcept>
#include <string>

namespace lqdim {

enum class ErrorKind {
    domain,              // argument outside the mathematical domain (q <= 1, c = 0, ...)
    field_mismatch,      // quadratic operands from different fields
    not_canonicalizable, // canonical key requested for a float
    validation,          // WIFS invariant violated
    unsupported,         // input valid but outside what the operation handles
    resource,            // atom / word / memory cap exceeded
    convergence,         // iterative scheme failed
    empty_restriction,   // restriction to a null interval
    refused,             // certificate or exact decision refused for this input
    config,              // malformed run configuration
    io                   // file system problems
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::field_mismatch: return "field-mismatch";
    case ErrorKind::not_canonicalizable: return "not-canonicalizable";
    case ErrorKind::validation: return "validation";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::resource: return "resource";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::empty_restriction: return "empty-restriction";
    case ErrorKind::refused: return "refused";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace lqdim
