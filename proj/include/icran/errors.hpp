/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace icran {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes, counts or antenna profiles that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input outside the mathematical domain of an evaluator (non-PSD covariance,
// zero rate under a logarithm). Carries the offending user when known.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, int user = -1)
      : Error(what), user_(user) {}
  int user() const noexcept { return user_; }

 private:
  int user_;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// Targets that cannot be met. rho() is the spectral radius that certifies it
// when the check is spectral, user() the first failing user otherwise.
class FeasibilityError : public Error {
 public:
  FeasibilityError(const std::string& what, double rho, int user = -1)
      : Error(what), rho_(rho), user_(user) {}
  double rho() const noexcept { return rho_; }
  int user() const noexcept { return user_; }

 private:
  double rho_;
  int user_;
};

class DegenerateChannelError : public Error {
 public:
  using Error::Error;
};

class NonSmoothError : public Error {
 public:
  using Error::Error;
};

// Request exceeds what an exhaustive routine is allowed to enumerate.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace icran
