// Copyright 2026 The hegram Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace hegram {

// Every error raised by the library derives from Error, so callers that only
// care about "bad input vs. bad usage" can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid layout / detector / handoff configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Vector length mismatch or ragged input.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Plaintext outside the 8-bit domain, or an encrypted sum that would overflow it.
class DomainError : public Error {
public:
    using Error::Error;
};

// Arithmetic on a ciphertext whose noise budget is exhausted.
class NoiseBudgetError : public Error {
public:
    using Error::Error;
};

// Ciphertext used with a key it was not produced under, or a corrupt blob.
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Requested backend was not compiled in.
class CapabilityError : public Error {
public:
    using Error::Error;
};

// Missing key store entries.
class KeyError : public Error {
public:
    using Error::Error;
};

// Malformed CSV row. line() is 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Timestamps that are not strictly hourly.
class ContinuityError : public Error {
public:
    ContinuityError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Measurement outside the scaling window while clamping is disabled.
class RangeError : public Error {
public:
    using Error::Error;
};

// Scenario parameters that cannot produce a valid fixture.
class SpecError : public Error {
public:
    using Error::Error;
};

}  // namespace hegram
