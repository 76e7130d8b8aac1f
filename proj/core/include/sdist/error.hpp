#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdist {

// Precondition violations throw std::invalid_argument; failures that depend on
// the numbers themselves throw one of the types below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t row, std::size_t column = 0)
      : Error(message), row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace sdist
