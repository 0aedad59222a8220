// Copyright 2026 The OVC Authors.
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

#ifndef OVC_ERROR_HPP_
#define OVC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ovc {

// Base class of every error raised by the library. The CLI maps IoError to
// exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument value (empty list, non-positive epsilon, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Data failed a content check (non-finite value, dimension drift, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Incompatible or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Tensor shapes do not fit the requested primitive.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A primitive produced a NaN or infinity.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Binary file has the wrong magic or version.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Binary file is truncated or has trailing garbage.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

// Named entity (class id, fixture case, parameter) does not exist.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Inputs are structurally fine but unusable (e.g. a class with no records).
class DataError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ovc

#endif  // OVC_ERROR_HPP_
