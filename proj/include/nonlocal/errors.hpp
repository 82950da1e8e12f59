#pragma once

#include <stdexcept>
#include <string>

namespace nonlocal {

/// Bad user input: violated preconditions, malformed configs, invalid geometry.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Failure detected while computing: incompatible data, singular systems,
/// non-finite values. The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nonlocal
