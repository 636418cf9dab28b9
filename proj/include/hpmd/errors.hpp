#pragma once

#include <stdexcept>
#include <string>

namespace hpmd {

/// Raised when user-supplied data (MDP, policy, config) violates a precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a solver cannot reach its tolerance or a chain is degenerate.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hpmd
