// Copyright 2026 The spatk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPATK_ERRORS_HPP
#define SPATK_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spatk {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Problems with the input data itself (bad values, bad files, bad geometry).
// The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

// Statistical/runtime failures on otherwise valid data (undersized bandwidth,
// degenerate resamples, failed selection). The CLI maps these to exit code 3.
class StatError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public DataError {
 public:
  ValidationError(std::size_t row, const std::string& msg)
      : DataError("row " + std::to_string(row) + ": " + msg), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class InsufficientPopulations : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateGeometry : public DataError {
 public:
  using DataError::DataError;
};

class SchemaError : public DataError {
 public:
  SchemaError(const std::string& column, const std::string& msg)
      : DataError(msg), column_(column) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : DataError("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyInput : public DataError {
 public:
  using DataError::DataError;
};

class BandwidthSelectionFailed : public StatError {
 public:
  using StatError::StatError;
};

class InsufficientCoverage : public StatError {
 public:
  InsufficientCoverage(double coverage, double required, const std::string& msg)
      : StatError(msg), coverage_(coverage), required_(required) {}
  double coverage() const { return coverage_; }
  double required() const { return required_; }

 private:
  double coverage_;
  double required_;
};

class BootstrapDegenerate : public StatError {
 public:
  using StatError::StatError;
};

// A resampling replicate failed; carries the replicate index.
class ReplicateError : public StatError {
 public:
  ReplicateError(std::size_t replicate, const std::string& msg)
      : StatError("replicate " + std::to_string(replicate) + ": " + msg),
        replicate_(replicate) {}
  std::size_t replicate() const { return replicate_; }

 private:
  std::size_t replicate_;
};

// Library misuse (bad population index, empty argument lists).
class IndexError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace spatk

#endif  // SPATK_ERRORS_HPP
