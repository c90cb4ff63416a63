/*
 * Copyright 2026 The onhkit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ONHKIT_ERRORS_H_
#define ONHKIT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace onhkit {

// Bad arguments, preconditions or configuration (CLI exit code 1).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent input data (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A metric whose denominator is zero.
class UndefinedMetric : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace onhkit

#endif  // ONHKIT_ERRORS_H_
