#pragma once

#include <stdexcept>
#include <string>

namespace mfi {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands disagree in shape or sequence length, or a size is not positive.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A scalar or enumerated argument is outside its documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A user-supplied refiner broke the shape or range contract of the pyramid.
class ContractError : public Error {
 public:
  using Error::Error;
};

// File-system failure; the message always carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file was readable but its contents are malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace mfi
