// Copyright 2026 The AILOT Authors
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

#ifndef AILOT_ERROR_H_
#define AILOT_ERROR_H_

#include <stdexcept>
#include <string>

namespace ailot {

// Base class of every error raised by the library. The CLI maps UsageError to
// exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments: bad ids, dimension or shape mismatches.
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class SelectionError : public Error {
 public:
  SelectionError(int found, int needed)
      : Error("found " + std::to_string(found) + ", need " +
              std::to_string(needed)),
        found_(found),
        needed_(needed) {}
  int found() const { return found_; }
  int needed() const { return needed_; }

 private:
  int found_;
  int needed_;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

// Non-finite dual potential inside Sinkhorn.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, int iteration)
      : Error(what + " at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

// Non-finite loss during intent training.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(int step)
      : Error("non-finite loss at step " + std::to_string(step)), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

class DegenerateRangeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace ailot

#endif  // AILOT_ERROR_H_
