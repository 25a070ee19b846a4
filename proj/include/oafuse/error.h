// Copyright (c) 2026 The oafuse Authors. All Rights Reserved.
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

#ifndef OAFUSE_ERROR_H_
#define OAFUSE_ERROR_H_

#include <stdexcept>
#include <string>

namespace oafuse {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller passed a value outside an operation's precondition
// (weight outside [0,1], unaligned waveforms, invalid distribution, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or unreadable input data: audio, posterior, manifest files.
class DataError : public Error {
 public:
  using Error::Error;
};

class WavError : public DataError {
 public:
  enum class Kind {
    kIo,
    kNotRiffWave,
    kUnsupportedEncoding,
    kChannelCount,
    kTruncated,
  };

  WavError(Kind kind, const std::string &what) : DataError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Anything that went wrong on the far side of the recognizer boundary.
class BackendError : public Error {
 public:
  enum class Kind {
    kTransport,  // could not start / reach the backend
    kTimeout,
    kProtocol,  // response violates the wire schema
    kCorruptPosterior,
    kReported,  // backend answered with an error object
  };

  BackendError(Kind kind, const std::string &what)
      : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace oafuse

#endif  // OAFUSE_ERROR_H_
