/*
 * Copyright 2026 The PIA Lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PIA_ERROR_H_
#define PIA_ERROR_H_

#include <stdexcept>
#include <string>

namespace pia {

// Error categories. The CLI maps each category onto a process exit code:
// usage/configuration -> 1, data -> 2, numeric/training -> 3.
enum class ErrorCategory { kUsage, kData, kNumeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

// Invalid shapes, bad architecture/input combinations, bad option values.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCategory::kUsage, message) {}
};

// API misuse, e.g. stepping an optimizer before gradients exist.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message)
      : Error(ErrorCategory::kUsage, message) {}
};

// Malformed attribute files, undecodable images, corrupt record files,
// pools too small for the sampler.
class DataError : public Error {
 public:
  explicit DataError(const std::string& message)
      : Error(ErrorCategory::kData, message) {}
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& message)
      : DataError("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class FormatError : public DataError {
 public:
  FormatError(std::size_t offset, const std::string& message)
      : DataError("byte offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class SamplingError : public DataError {
 public:
  SamplingError(const std::string& what, std::size_t required,
                std::size_t available)
      : DataError(what + ": required " + std::to_string(required) +
                  ", available " + std::to_string(available)),
        required_(required),
        available_(available) {}
  std::size_t required() const { return required_; }
  std::size_t available() const { return available_; }

 private:
  std::size_t required_;
  std::size_t available_;
};

// Non-finite values in a forward/backward pass or loss.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message)
      : Error(ErrorCategory::kNumeric, message) {}
};

class TrainingError : public NumericError {
 public:
  TrainingError(int epoch, const std::string& message)
      : NumericError("epoch " + std::to_string(epoch) + ": " + message),
        epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

int ExitCodeFor(ErrorCategory category);

}  // namespace pia

#endif  // PIA_ERROR_H_
