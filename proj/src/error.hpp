// Copyright 2026 The ShieldSyn Authors
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

#ifndef SHIELDSYN_ERROR_HPP_
#define SHIELDSYN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace shieldsyn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector/polynomial space sizes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed text: polynomial strings, weight files, configs.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Bad user configuration (unknown benchmark, odd degree, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A constraint cannot be expressed with the chosen monomial basis.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// NaN/inf showed up where finite values are required.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A runtime-monitor invariant was violated (e.g. shield program aborted).
class InvariantBreach : public Error {
 public:
  using Error::Error;
};

}  // namespace shieldsyn

#endif  // SHIELDSYN_ERROR_HPP_
