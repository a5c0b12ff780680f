#pragma once

#include <stdexcept>
#include <string>

namespace prandtl {

/// Broad failure classes. Each maps onto one CLI exit code.
enum class ErrorKind {
    Config,     // malformed or out-of-range input
    Numerical,  // the numerics left their valid regime (collapse, NaN, truncation)
    Regime,     // parameters violate the small-data regime in strict mode
    Io,         // file format / filesystem problems
};

/// Library-wide exception. `code()` is a short machine-readable tag such as
/// "weight-tail" or "radius-collapse"; `what()` carries the human message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

inline int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Numerical: return 3;
    case ErrorKind::Regime: return 4;
    case ErrorKind::Io: return 1;
    }
    return 1;
}

}  // namespace prandtl
