// Copyright 2026 The vflsim Authors
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

#ifndef VFLSIM_ERRORS_HPP_
#define VFLSIM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace vflsim {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or layer shapes do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

// A NaN or infinity showed up where only finite values are allowed.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed CSV or schema input. Carries the offending position when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, long row = -1, long column = -1)
      : Error(Format(message, row, column)), row_(row), column_(column) {}

  long row() const { return row_; }
  long column() const { return column_; }

 private:
  static std::string Format(const std::string& message, long row,
                            long column) {
    if (row < 0 && column < 0) return message;
    std::string where = " (";
    if (row >= 0) where += "row " + std::to_string(row);
    if (row >= 0 && column >= 0) where += ", ";
    if (column >= 0) where += "column " + std::to_string(column);
    return message + where + ")";
  }

  long row_;
  long column_;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& message, int epoch, long batch)
      : Error(message + " (epoch " + std::to_string(epoch) + ", batch " +
              std::to_string(batch) + ")"),
        epoch_(epoch),
        batch_(batch) {}

  int epoch() const { return epoch_; }
  long batch() const { return batch_; }

 private:
  int epoch_;
  long batch_;
};

// The two parties could not agree on the cut-layer geometry.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vflsim

#endif  // VFLSIM_ERRORS_HPP_
