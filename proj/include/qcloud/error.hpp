// Copyright 2026 The qcloud Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qcloud {

/// Failure categories. The numeric values double as process exit codes.
enum class ErrorCode : int {
    usage = 1,
    validation = 2,
    numerical = 3,
    io = 4,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(what), code_(code) {}
    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

/// Invalid dimensions, indices or hyperparameters.
class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string &what)
        : Error(ErrorCode::validation, what) {}
};

/// Input data violating a documented invariant.
class ValidationError : public Error {
  public:
    explicit ValidationError(const std::string &what)
        : Error(ErrorCode::validation, what) {}
};

/// Non-finite loss or singular system.
class NumericalError : public Error {
  public:
    explicit NumericalError(const std::string &what)
        : Error(ErrorCode::numerical, what) {}
};

class IoError : public Error {
  public:
    explicit IoError(const std::string &what) : Error(ErrorCode::io, what) {}
};

} // namespace qcloud
