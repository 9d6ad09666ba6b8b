// Copyright 2026 The dfreeze Authors
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

namespace dfreeze {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (coincident spin positions, zero detuning where a ratio is taken, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An object could not be constructed consistently (rejection sampling ran
/// out of attempts, drive segments do not tile the period, ...).
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// The problem is too large for the requested backend.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A numerical invariant (norm, spin length) drifted beyond tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A least-squares fit failed to converge or the data is degenerate.
class FitError : public Error {
 public:
  using Error::Error;
};

/// A configuration document failed schema validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace dfreeze
