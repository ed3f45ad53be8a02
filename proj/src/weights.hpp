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

#include <cmath>
#include <span>

#include <Eigen/Core>

#include "icran/errors.hpp"

namespace icran::detail {

inline Eigen::VectorXd resolve_weights(std::span<const double> w, int users) {
  if (w.empty()) return Eigen::VectorXd::Ones(users);
  if (static_cast<int>(w.size()) != users) throw DimensionError("one weight per user");
  Eigen::VectorXd out(users);
  for (int k = 0; k < users; ++k) {
    if (!(w[k] > 0.0) || !std::isfinite(w[k]))
      throw ParameterError("weight of user " + std::to_string(k) + " must be > 0");
    out[k] = w[k];
  }
  return out;
}

}  // namespace icran::detail
