#pragma once

#include <stdexcept>
#include <string>

namespace mixea {

/// Invalid user input: bad parameters, malformed config, unresolved names.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The requested problem does not fit the exact (dense) analysis path.
class InfeasibleSizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A proven identity or inequality failed numerically. Always a bug, never
/// a property of the input.
class TheoremViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace mixea
