#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aba {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Cholesky failed even after the maximum diagonal jitter.
class NumericalInstability : public Error {
  public:
    using Error::Error;
};

class InfeasibleCap : public Error {
  public:
    using Error::Error;
};

class InsufficientData : public Error {
  public:
    using Error::Error;
};

class HorizonExceeded : public Error {
  public:
    using Error::Error;
};

// Bad configuration or scenario; the CLI maps this to exit code 1.
class ConfigError : public Error {
  public:
    using Error::Error;
};

// Malformed input file. row is 1-based and counts the header line; 0 when unknown.
class DataError : public Error {
  public:
    DataError(const std::string& what, std::size_t row = 0)
        : Error(row ? what + " (row " + std::to_string(row) + ")" : what), row_(row) {}

    std::size_t row() const { return row_; }

  private:
    std::size_t row_;
};

} // namespace aba
