// Copyright 2026 The descjudge Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace descjudge {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input that could not be decoded (carries a line number when known).
class ParseError : public Error {
  public:
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

/// Well-formed input that violates a documented invariant.
class ValidationError : public Error {
  public:
    using Error::Error;
};

class NotFoundError : public Error {
  public:
    using Error::Error;
};

/// A numeric argument outside its documented domain (e.g. a dimension outside [0,1]).
class DomainError : public Error {
  public:
    using Error::Error;
};

class TemplateError : public Error {
  public:
    using Error::Error;
};

/// Network-level failure. `retryable()` distinguishes transient faults
/// (timeouts, 429, 5xx) from permanent ones (auth, 4xx).
class TransportError : public Error {
  public:
    explicit TransportError(const std::string& what, bool retryable = true)
        : Error(what), retryable_(retryable) {}
    bool retryable() const { return retryable_; }

  private:
    bool retryable_;
};

/// The judge answered, but not in the agreed shape (wrong verdict count,
/// out-of-range grade, missing dimension).
class ContractError : public Error {
  public:
    using Error::Error;
};

/// REPLAY was asked for a request digest the cassette does not hold.
class CassetteMissError : public Error {
  public:
    using Error::Error;
};

class EmptyInputError : public Error {
  public:
    using Error::Error;
};

class ZeroVectorError : public Error {
  public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
  public:
    using Error::Error;
};

class NoOverlapError : public Error {
  public:
    using Error::Error;
};

class MissingPolarityError : public Error {
  public:
    using Error::Error;
};

class NoDataError : public Error {
  public:
    using Error::Error;
};

class DegenerateDenominatorError : public Error {
  public:
    using Error::Error;
};

/// Checkpoint file cannot be resumed from. `kind()` is a stable token
/// ("CONFIG_DRIFT", "BAD_HEADER", ...) for programmatic handling.
class CorruptCheckpointError : public Error {
  public:
    CorruptCheckpointError(const std::string& kind, const std::string& what)
        : Error(kind + ": " + what), kind_(kind) {}
    const std::string& kind() const { return kind_; }

  private:
    std::string kind_;
};

class FatalConfigError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

} // namespace descjudge
