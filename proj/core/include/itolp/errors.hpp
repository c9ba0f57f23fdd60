#pragma once

#include <stdexcept>
#include <string>

namespace itolp {

/// Invalid or inconsistent configuration (bad parameter, unknown id, support overflow).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of an operation (p < 2, t outside [0, T], t off-grid).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A structural precondition on inputs was violated (e.g. jump-integrand orthogonality).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace itolp
