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

#include <optional>
#include <span>
#include <vector>

#include "icran/channels.hpp"
#include "icran/parallel.hpp"
#include "icran/solver_trace.hpp"
#include "icran/utilities.hpp"

namespace icran {

// Weights: empty means unit weights, otherwise one positive weight per user.
// Every solver records the weighted sum rate (or utility, for CCA) of the
// starting point and of each iterate in objective_history.

// ---- pricing ---------------------------------------------------------------

/// Interference prices in the scaling of user k's own rate:
/// T^n_k = 1/(mu_k ln 2) sum_{l != k} mu_l |H^n_kl|^2 (1/I^n_l - 1/(I^n_l + S^n_l))
/// with I^n_l the noise plus interference and S^n_l the useful power at
/// receiver l. K x N, nonnegative.
Eigen::MatrixXd interference_prices(const ParallelChannel& ch, const PowerMatrix& p,
                                    std::span<const double> weights = {});

/// Best response of user k to fixed prices: maximizes
/// R_k - sum_n p^n_k T^n_k subject to the budget.
Eigen::VectorXd priced_best_response(const ParallelChannel& ch, const PowerMatrix& p, int k,
                                     const Eigen::VectorXd& prices);

struct MdpOptions {
  double tol = 0.01;  // stop when a sweep gains less than this
  int max_iter = 500;
};

/// Sequential distributed pricing from equal power. One iteration is a sweep
/// over users in index order; prices are refreshed before every user.
SolverTrace<PowerMatrix> mdp_solve(const ParallelChannel& ch, std::span<const double> weights = {},
                                   const MdpOptions& opts = {});

// ---- SCALE -----------------------------------------------------------------

struct ScaleParams {
  Eigen::MatrixXd alpha;  // K x N
  Eigen::MatrixXd beta;
};

/// alpha = z0/(1+z0), beta = log2(1+z0) - alpha log2(z0); z0 floored at 1e-12.
std::pair<double, double> log_bound_params(double z0);
ScaleParams scale_params(const ParallelChannel& ch, const PowerMatrix& p);

/// Value of the relaxed objective sum_k mu_k sum_n alpha (log2 SIR) + beta.
double scale_surrogate(const ParallelChannel& ch, const ScaleParams& sp, const PowerMatrix& p,
                       std::span<const double> weights = {});

struct ScaleOptions {
  double tol = 0.01;       // outer stop on the weighted sum rate gain
  int max_iter = 200;
  int grad_steps = 50;     // projected gradient steps per inner solve
  double step_size = 0.0;  // initial step; 0 picks 0.1 / (largest weight)
};

SolverTrace<PowerMatrix> scale_solve(const ParallelChannel& ch, std::span<const double> weights = {},
                                     const ScaleOptions& opts = {});

// ---- WMMSE -----------------------------------------------------------------

struct WmmseOptions {
  double epsilon = 0.01;  // stop on |sum log w - sum log w'|
  int max_iter = 1000;
  Exec exec = Exec::serial;
};

/// Scalar per-tone WMMSE variables, each K x N.
struct WmmseParallelState {
  Eigen::MatrixXcd v;
  Eigen::MatrixXcd u;
  Eigen::MatrixXd w;
};

WmmseParallelState wmmse_parallel_init(const ParallelChannel& ch);
/// MMSE receivers and weights w = 1/(1 - conj(u) H v) for the current v.
void wmmse_parallel_update_uw(const ParallelChannel& ch, WmmseParallelState& s,
                              Exec exec = Exec::serial);
/// Transmit update with the budget multiplier found by bisection.
void wmmse_parallel_update_v(const ParallelChannel& ch, std::span<const double> weights,
                             WmmseParallelState& s, Exec exec = Exec::serial);
/// Mean-square error of every stream under the state's u and v.
Eigen::MatrixXd wmmse_parallel_mse(const ParallelChannel& ch, const WmmseParallelState& s);

/// Final iterate is |v|^2.
SolverTrace<PowerMatrix> wmmse_parallel(const ParallelChannel& ch,
                                        std::span<const double> weights = {},
                                        const WmmseOptions& opts = {});

/// MIMO WMMSE with streams[k] columns per precoder. The default start puts
/// equal power on the leading right singular vectors of H_kk; init overrides
/// it. Throws DimensionError if a stream count exceeds min(M_k, N_k).
SolverTrace<BeamformerSet> wmmse_mimo(const MimoChannel& ch, std::span<const int> streams,
                                      std::span<const double> weights = {},
                                      const WmmseOptions& opts = {},
                                      const std::optional<std::vector<Eigen::MatrixXcd>>& init = {});

/// Utilities the WMMSE solvers accept: (weighted) sum rate only.
bool utility_admissible(const UtilitySpec& spec);

// ---- CCA -------------------------------------------------------------------

struct CcaOptions {
  double armijo_c = 1e-4;
  double shrink = 0.5;
  double tol = 1e-6;  // stop when every ||d_k|| is below this in one sweep
  int max_iter = 2000;
};

/// Gradient of the utility with respect to v_k as a complex vector: the
/// real and imaginary parts are the partial derivatives along Re v_k and
/// Im v_k.
Eigen::VectorXcd cca_gradient(const MisoChannel& ch, const UtilitySpec& spec,
                              const BeamVectors& v, int k);

/// Cyclic gradient projection from scaled MRT. residual_history holds the
/// largest ||d_k|| of each sweep. Throws NonSmoothError for min-rate.
SolverTrace<BeamVectors> cca_miso(const MisoChannel& ch, const UtilitySpec& spec,
                                  const CcaOptions& opts = {});

}  // namespace icran
