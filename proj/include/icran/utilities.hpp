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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icran/types.hpp"

namespace icran {

enum class UtilityKind { alpha_fair, sum_rate, proportional_fair, harmonic, min_rate };

// System utility of the per-user rates.
//
//   sum_rate           sum_k mu_k R_k
//   proportional_fair  sum_k mu_k ln R_k
//   harmonic           (sum_k 1/R_k)^-1
//   min_rate           min_k R_k
//   alpha_fair         sum_k mu_k R_k^(1-alpha) / (1-alpha); alpha == 1 is
//                      evaluated as proportional_fair
//
// An empty weight list means unit weights.
struct UtilitySpec {
  UtilityKind kind = UtilityKind::sum_rate;
  double alpha = 0.0;
  std::vector<double> weights;

  static UtilitySpec sum_rate(std::vector<double> weights = {});
  static UtilitySpec alpha_fair(double alpha, std::vector<double> weights = {});

  // "sum", "propfair", "harmonic", "minrate", "alpha:<value>".
  static UtilitySpec parse(std::string_view text);
  std::string to_string() const;

  double weight(int k) const { return weights.empty() ? 1.0 : weights[k]; }
  // Twice differentiable on positive rates.
  bool smooth() const { return kind != UtilityKind::min_rate; }
  void validate(int users) const;
};

struct QosTargets {
  std::vector<double> sinr;  // gamma_k
  std::vector<double> rate;  // zeta_k
};

void validate(const QosTargets& targets, int users);

// Throws DomainError naming the first zero rate for the log and harmonic
// kinds.
double evaluate(const UtilitySpec& spec, std::span<const double> rates);
double evaluate(const UtilitySpec& spec, const Eigen::VectorXd& rates);

// dU/dR_k. Throws NonSmoothError for min_rate.
Eigen::VectorXd marginal_utility(const UtilitySpec& spec, const Eigen::VectorXd& rates);

// Central differences with h_i = h or 1e-5 * max(1, |x_i|) when h is unset.
Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x, std::optional<double> h = {});

}  // namespace icran
