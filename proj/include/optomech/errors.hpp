#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rejected input: violated precondition, non-finite value, bad config.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Numerical failures. The CLI maps all of these to exit code 2.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NonConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularMatrix : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class Unstable : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StepTooLarge : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotSymmetric : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotPositive : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ZeroCoupling : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace optomech
