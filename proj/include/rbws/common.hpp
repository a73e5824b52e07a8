#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbws {

using Vector = std::vector<double>;
using Index = std::int32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad sizes, parameters outside their box, invalid counts.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Zero diagonals, failed factorizations, CG breakdown on a non-SPD operator.
class OperatorError : public Error {
 public:
  using Error::Error;
};

class DegenerateBasisError : public Error {
 public:
  using Error::Error;
};

class DependentSnapshotError : public Error {
 public:
  using Error::Error;
};

class IllConditionedModelError : public Error {
 public:
  using Error::Error;
};

class ModelFormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

inline void require_size(std::size_t got, std::size_t expected, const char* what) {
  if (got != expected) {
    throw DomainError(std::string(what) + ": size " + std::to_string(got) + " != " +
                      std::to_string(expected));
  }
}

}  // namespace rbws
