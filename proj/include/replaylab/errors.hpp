#pragma once

#include <stdexcept>
#include <string>

namespace replaylab {

/// A parameter lies outside the domain an operation is defined on.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Transitions pushed out of global-time order.
class OrderingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Sampling requested from an empty buffer or a zero-mass distribution.
class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine produced a non-finite or out-of-contract result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The fitted Q table left the admissible band during training.
class DivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace replaylab
