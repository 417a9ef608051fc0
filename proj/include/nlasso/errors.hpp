#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlasso {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class ConstantColumn : public Error {
 public:
  explicit ConstantColumn(std::ptrdiff_t column)
      : Error("column " + std::to_string(column) + " has zero variance"),
        column(column) {}
  std::ptrdiff_t column;
};

class BadK : public Error {
 public:
  using Error::Error;
};

class DegenerateSplit : public Error {
 public:
  using Error::Error;
};

class BadConfig : public Error {
 public:
  using Error::Error;
};

// Carries the last iterate so callers can inspect or salvage it.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, std::vector<double> iterate,
                double intercept, long iterations)
      : Error(what),
        iterate(std::move(iterate)),
        intercept(intercept),
        iterations(iterations) {}
  std::vector<double> iterate;
  double intercept;
  long iterations;
};

class SingleClass : public Error {
 public:
  using Error::Error;
};

class FoldTooSmall : public Error {
 public:
  using Error::Error;
};

class SingularDesign : public Error {
 public:
  using Error::Error;
};

class ZeroVariance : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line, long column)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
  long line;
  long column;
};

class MissingTarget : public Error {
 public:
  using Error::Error;
};

class NonBinaryTarget : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlasso
