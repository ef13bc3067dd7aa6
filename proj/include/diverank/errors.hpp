#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diverank {

// Base type for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad configuration or parameter values. The CLI maps these to exit code 1.
struct ConfigError : Error {
  using Error::Error;
};

// Unreadable or malformed input data. The CLI maps these to exit code 2.
struct DataError : Error {
  using Error::Error;
};

struct InvalidConfig : ConfigError {
  using ConfigError::ConfigError;
};

struct InvalidAlpha : ConfigError {
  explicit InvalidAlpha(double alpha)
      : ConfigError("alpha must lie in [0,1], got " + std::to_string(alpha)) {}
};

struct MalformedLine : DataError {
  MalformedLine(std::size_t line, const std::string& what)
      : DataError("malformed line " + std::to_string(line) + ": " + what),
        line_number(line) {}
  std::size_t line_number;
};

struct EmptyCorpus : DataError {
  EmptyCorpus() : DataError("corpus contains no ratings") {}
};

struct EmptyPool : DataError {
  EmptyPool() : DataError("candidate pool is empty") {}
};

struct EmptyCandidates : DataError {
  EmptyCandidates() : DataError("candidate set is empty") {}
};

struct EmptyList : DataError {
  EmptyList() : DataError("ranked list is empty") {}
};

struct EmptyUserSet : DataError {
  EmptyUserSet() : DataError("run set contains no users") {}
};

struct PositionOutOfRange : Error {
  PositionOutOfRange(std::size_t position, std::size_t n)
      : Error("position " + std::to_string(position) + " outside 1.." +
              std::to_string(n)) {}
};

// A caller broke a documented precondition (e.g. a candidate pool that still
// contains items the user rated in train).
struct PreconditionViolation : Error {
  using Error::Error;
};

}  // namespace diverank
