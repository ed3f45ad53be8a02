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

#include <span>
#include <vector>

#include "icran/channels.hpp"
#include "icran/solver_trace.hpp"

namespace icran {

/// Spectral radius of a square nonnegative matrix by power iteration.
///
/// Iterates on M + cI (c = half the largest row sum) from the all-ones
/// vector. The shift keeps the Perron root strictly dominant, so periodic
/// matrices such as [[0, a], [b, 0]] converge instead of oscillating.
/// Stops when the Collatz-Wielandt bounds agree to rel_tol or the
/// eigenvalue estimate stops moving; after max_iter the upper bound is
/// returned.
double spectral_radius(const Eigen::MatrixXd& m, double rel_tol = 1e-10,
                       int max_iter = 1'000'000);

/// Z(k, l) = |H_lk|^2 / |H_kk|^2, unit diagonal.
Eigen::MatrixXd gain_ratio_matrix(const ScalarChannel& ch);

/// A(k, l) = gamma_k |H_lk|^2 / |H_kk|^2 for l != k, zero diagonal.
Eigen::MatrixXd target_gain_matrix(const ScalarChannel& ch, std::span<const double> sinr_targets);

/// Supremum of the max-min SINR problem without power limits,
/// 1 / (rho(Z) - 1). Throws DegenerateChannelError when rho(Z) <= 1 + 1e-12.
double maxmin_sinr_optimum(const ScalarChannel& ch);

/// One autonomous power control update towards gamma_star:
/// p_k <- max(0, p_k - beta (SINR_k - gamma_star) den_k / |H_kk|^2).
PowerVector apc_step(const ScalarChannel& ch, const PowerVector& p, double gamma_star,
                     double beta);

struct FeasibilityReport {
  bool feasible = false;
  double rho = 0.0;
};

FeasibilityReport minpower_feasible(const ScalarChannel& ch, std::span<const double> sinr_targets);

/// p = (I - A)^-1 b through an LU solve. Throws FeasibilityError carrying
/// rho(A) when rho(A) >= 1.
PowerVector minpower_closed_form(const ScalarChannel& ch, std::span<const double> sinr_targets);

struct YatesOptions {
  double tol = 1e-10;         // stop when ||p(t+1) - p(t)||_inf <= tol
  int max_iter = 10'000;
  double divergence = 1e12;   // ||p||_inf beyond this flags divergence
};

/// Standard interference function iteration
/// p_k <- gamma_k (1 + sum_{l != k} |H_lk|^2 p_l) / |H_kk|^2.
/// residual_history holds ||p(t) - p(final)||_inf for every iterate.
SolverTrace<PowerVector> yates_fixed_point(const ScalarChannel& ch,
                                           std::span<const double> sinr_targets,
                                           const PowerVector& p0, const YatesOptions& opts = {});

/// Linear rate estimate from a distance-to-limit history: geometric mean
/// ratio over the iterates whose distance exceeds floor. NaN when fewer
/// than two such iterates exist.
double estimate_contraction(const std::vector<double>& distances, double floor);

}  // namespace icran
