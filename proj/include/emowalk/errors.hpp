#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace emowalk {

/// Bad input data (files, labels, matrices). The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration or parameters. The CLI maps these to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedRow : public DataError {
 public:
  MalformedRow(std::size_t line, const std::string& reason)
      : DataError("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

#define EMOWALK_DATA_ERROR(Name)          \
  class Name : public DataError {         \
   public:                                \
    using DataError::DataError;           \
  };

EMOWALK_DATA_ERROR(UnknownConditionCode)
EMOWALK_DATA_ERROR(DegenerateWindow)
EMOWALK_DATA_ERROR(EmptyDataset)
EMOWALK_DATA_ERROR(SingleClassDataset)
EMOWALK_DATA_ERROR(DimensionMismatch)
EMOWALK_DATA_ERROR(TooFewPerClass)
EMOWALK_DATA_ERROR(LengthMismatch)
EMOWALK_DATA_ERROR(EmptyInput)
EMOWALK_DATA_ERROR(SingleClassTruth)
EMOWALK_DATA_ERROR(TooFewPairs)
EMOWALK_DATA_ERROR(TooFewUsers)

#undef EMOWALK_DATA_ERROR

class InvalidConfig : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class EmptySpace : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidSpec : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace emowalk
