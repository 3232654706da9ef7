// Copyright 2026 The wvqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace wvqkd {

/// Parameter outside its admissible range (probabilities, rates, coupling).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Tr(E rho) vanished, so the weak value is undefined.
class OrthogonalPostSelection : public std::runtime_error {
 public:
  OrthogonalPostSelection()
      : std::runtime_error("orthogonal post-selection: Tr(E rho) is zero") {}
};

/// Neither photons nor dark counts can produce a click.
class DeadChannel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// mu + mu_perp <= 0: the coupling cannot be estimated from the data.
class DegenerateCoupling : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The reference weak value passed to the contextuality measure lies in [0, 1].
class NonAnomalousReference : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An estimator needs samples from a PPS bucket that is empty or too small.
class InsufficientStatistics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed run configuration (unknown key, wrong type, bad value).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wvqkd
