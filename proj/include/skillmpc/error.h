// Copyright 2026 The skillmpc Authors
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

#ifndef SKILLMPC_ERROR_H_
#define SKILLMPC_ERROR_H_

#include <stdexcept>
#include <string>

namespace skillmpc {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejected argument: empty batches, bad counts, non-scalar losses.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Vector or matrix shapes do not line up. Nothing is ever broadcast
// implicitly.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Operation does not apply to this kind of object (e.g. enumerating a
// continuous skill space).
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

// NaN / inf encountered. The message carries a location tag.
class NumericFault : public Error {
 public:
  using Error::Error;
};

// A model was queried before its normalizers saw any data.
class UninitializedModel : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace skillmpc

#endif  // SKILLMPC_ERROR_H_
