#pragma once

#include <stdexcept>
#include <string>

namespace uaseg {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed data fed into an operation (shape mismatch, non-finite input,
// fewer samples than required, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// A parameter outside its documented range (strength > 1, sigma <= 0, ...).
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

// A computation produced non-finite values.
class NumericError : public Error {
public:
    using Error::Error;
};

// File-system and codec failures.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace uaseg
