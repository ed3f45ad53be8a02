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

#include <string>
#include <vector>

#include "icran/types.hpp"

namespace icran {

enum class Termination { converged, max_iterations, diverged, infeasible };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iterations: return "max_iterations";
    case Termination::diverged: return "diverged";
    case Termination::infeasible: return "infeasible";
  }
  return "unknown";
}

// Result of an iterative solver. objective_history holds the objective at
// the starting point followed by one entry per iteration, so its length is
// iterations + 1. residual_history is solver specific (NE residual for the
// water-filling games, distance to the limit for the Yates iteration,
// stationarity residual for CCA).
template <class Iterate>
struct SolverTrace {
  std::string algorithm;
  std::vector<double> objective_history;
  std::vector<double> residual_history;
  Iterate final_iterate{};
  Eigen::VectorXd final_rates;
  std::vector<Eigen::VectorXd> rate_history;  // per-user rates, filled by the games
  bool converged = false;
  int iterations = 0;
  Termination termination = Termination::max_iterations;
};

}  // namespace icran
