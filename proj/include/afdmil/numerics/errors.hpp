#ifndef AFDMIL_NUMERICS_ERRORS_HPP
#define AFDMIL_NUMERICS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace afdmil {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class EmptyBagError : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace afdmil

#endif  // AFDMIL_NUMERICS_ERRORS_HPP
