// Copyright 2026 The lftree Authors
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

#ifndef LFTREE_ERROR_HPP
#define LFTREE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace lftree {

/// Base class of every exception thrown by the library. The C API maps each
/// subclass onto one status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed candidate-pool or label files. Messages name the row and column.
class IngestionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument was violated (unknown id, bad dimension, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration file or override.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The LLM endpoint could not be reached after all retries.
class NetworkError : public Error {
 public:
  using Error::Error;
};

/// Every candidate in the pool has been observed.
class ExhaustedError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lftree

#endif  // LFTREE_ERROR_HPP
