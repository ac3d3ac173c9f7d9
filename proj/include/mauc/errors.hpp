#pragma once

#include <stdexcept>
#include <string>

namespace mauc {

/// Invalid model parameters (alphabet size, order, probability rows).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input data that does not fit the model it is used with.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numeric routine failed to produce a trustworthy answer.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Encoder and decoder memories differ (fingerprint mismatch).
class ContextMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed, truncated or corrupted bitstream.
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mauc
