#pragma once

#include <stdexcept>
#include <string>

namespace iqm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable or unwritable file.
class IoError : public Error {
public:
    using Error::Error;
};

// Recognized container with unsupported properties (bit depth, maxval, ...).
class FormatError : public Error {
public:
    using Error::Error;
};

// Mismatched or insufficient image dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Parameter outside its documented domain.
class ParamError : public Error {
public:
    using Error::Error;
};

}  // namespace iqm
