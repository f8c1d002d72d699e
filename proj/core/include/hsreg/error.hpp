// Copyright 2026 The hsreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HSREG_ERROR_HPP_
#define HSREG_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsreg {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix / batch dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function (sigma <= 0, p not
// in (0,1), label outside gamma support, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// API misuse, e.g. consuming a gradient tape twice.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Non-finite values during optimisation.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::size_t parameter_index = npos)
      : Error(what), parameter_index_(parameter_index) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  // Flat index of the offending parameter, or npos when not applicable.
  std::size_t parameter_index() const noexcept { return parameter_index_; }

 private:
  std::size_t parameter_index_;
};

// Feature schema cannot be fitted (e.g. zero-variance numeric field).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Invalid user configuration. `field` names the offending setting.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Malformed or insufficient input data.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace hsreg

#endif  // HSREG_ERROR_HPP_
