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

#include "icran/channels.hpp"
#include "icran/parallel.hpp"
#include "icran/solver_trace.hpp"

namespace icran {

/// Rate-adaptive water-filling: p_n = [mu - npi_n / g_n]^+ with
/// sum_n p_n = budget. The level is bracketed by bisection and then
/// recomputed exactly from the active set.
Eigen::VectorXd waterfill(const Eigen::VectorXd& gains, const Eigen::VectorXd& npi,
                          double budget);

/// Fixed-margin water-filling: least total power with
/// sum_n log2(1 + g_n p_n / npi_n) = rate. Throws FeasibilityError (tagged
/// with user) when the level would have to exceed 1e12.
Eigen::VectorXd fm_waterfill(const Eigen::VectorXd& gains, const Eigen::VectorXd& npi,
                             double rate, int user = -1);

enum class Schedule { sequential, simultaneous };

struct IwfaOptions {
  Schedule schedule = Schedule::sequential;
  double damping = 0.0;  // new = damping * old + (1 - damping) * best response
  double tol = 1e-8;
  int max_iter = 1000;
  Exec exec = Exec::serial;  // simultaneous schedule only
};

/// Noise plus interference seen by user k on every tone.
Eigen::VectorXd measure_npi(const ParallelChannel& ch, const PowerMatrix& p, int k);

/// Iterative water-filling from zero power. One iteration is one sweep over
/// all users; residual_history holds ne_residual after each sweep.
SolverTrace<PowerMatrix> iwfa(const ParallelChannel& ch, const IwfaOptions& opts = {});

struct Certificate {
  bool holds = false;
  double rho = 0.0;
};

/// Upsilon(q, r) = max_n |H^n_rq|^2 / |H^n_qq|^2 for r != q.
Eigen::MatrixXd upsilon_matrix(const ParallelChannel& ch);

Certificate cert_simultaneous(const ParallelChannel& ch);
Certificate cert_sequential(const ParallelChannel& ch);

/// True when |H^n_rq|^2/|H^n_qq|^2 and |H^n_qr|^2/|H^n_rr|^2 agree within
/// tol (relative, floored at 1) for every pair and tone.
bool cert_symmetric_crosstalk(const ParallelChannel& ch, double tol = 1e-12);

/// sum_{l != k} |H^n_kl|^2 / |H^n_kk|^2 < 1 / (exp(zeta_k) - 1) for all
/// (n, k). Note the natural exponential even though rates are in bits.
bool fm_feasibility_check(const ParallelChannel& ch, std::span<const double> rate_targets);

struct FmIwfaOptions {
  Schedule schedule = Schedule::sequential;
  double tol = 1e-9;
  int max_iter = 5000;
  bool override_feasibility = false;  // run even if fm_feasibility_check fails
};

/// Fixed-margin IWFA. Throws FeasibilityError when the feasibility check
/// fails (unless overridden) or a user's water level hits the cap.
SolverTrace<PowerMatrix> fm_iwfa(const ParallelChannel& ch, std::span<const double> rate_targets,
                                 const FmIwfaOptions& opts = {});

/// max_k ||p_k - BR_k(p_-k)||_inf for the rate-adaptive game.
double ne_residual(const ParallelChannel& ch, const PowerMatrix& p);

}  // namespace icran
