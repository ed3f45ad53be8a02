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

#include <cmath>
#include <numbers>

#include "icran/errors.hpp"
#include "icran/waterfilling.hpp"
#include "icran/wsrm.hpp"
#include "weights.hpp"

namespace icran {

Eigen::MatrixXd interference_prices(const ParallelChannel& ch, const PowerMatrix& p,
                                    std::span<const double> weights) {
  const int K = ch.users();
  const int N = ch.tones();
  if (p.rows() != K || p.cols() != N) throw DimensionError("power matrix must be users x tones");
  Eigen::VectorXd mu = detail::resolve_weights(weights, K);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(K, N);
  Eigen::VectorXd d(K);
  for (int n = 0; n < N; ++n) {
    for (int l = 0; l < K; ++l) {
      double i = 1.0;
      for (int j = 0; j < K; ++j)
        if (j != l) i += ch.power_gain(n, j, l) * p(j, n);
      double s = ch.power_gain(n, l, l) * p(l, n);
      // 1/i - 1/(i + s) without cancellation.
      d[l] = mu[l] * s / (i * (i + s));
    }
    for (int k = 0; k < K; ++k) {
      double acc = 0.0;
      for (int l = 0; l < K; ++l)
        if (l != k) acc += ch.power_gain(n, k, l) * d[l];
      t(k, n) = acc / (mu[k] * std::numbers::ln2);
    }
  }
  return t;
}

Eigen::VectorXd priced_best_response(const ParallelChannel& ch, const PowerMatrix& p, int k,
                                     const Eigen::VectorXd& prices) {
  const int N = ch.tones();
  if (prices.size() != N) throw DimensionError("one price per tone");
  const double budget = ch.budget(k);
  if (budget == 0.0) return Eigen::VectorXd::Zero(N);
  Eigen::VectorXd npi = measure_npi(ch, p, k);
  Eigen::VectorXd floor(N);
  double top = 0.0;
  bool bounded = true;
  for (int n = 0; n < N; ++n) {
    floor[n] = npi[n] / ch.power_gain(n, k, k);
    top = std::max(top, 1.0 / (floor[n] * std::numbers::ln2));
    if (!(prices[n] > 0.0)) bounded = false;
  }
  auto alloc = [&](double lambda) {
    Eigen::VectorXd out(N);
    for (int n = 0; n < N; ++n)
      out[n] = std::max(0.0, 1.0 / ((lambda + prices[n]) * std::numbers::ln2) - floor[n]);
    return out;
  };
  if (bounded) {
    Eigen::VectorXd free = alloc(0.0);
    if (free.sum() <= budget) return free;
  }
  // Every tone is off once lambda reaches top.
  double lo = 0.0;
  double hi = top;
  for (int it = 0; it < 200 && lo < hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (alloc(mid).sum() > budget) lo = mid; else hi = mid;
  }
  return alloc(hi);
}

SolverTrace<PowerMatrix> mdp_solve(const ParallelChannel& ch, std::span<const double> weights,
                                   const MdpOptions& opts) {
  const int K = ch.users();
  const int N = ch.tones();
  Eigen::VectorXd mu = detail::resolve_weights(weights, K);
  if (!(opts.tol > 0.0) || opts.max_iter < 1) throw ParameterError("tol > 0 and max_iter >= 1");
  std::span<const double> w(mu.data(), K);

  PowerMatrix p(K, N);
  for (int k = 0; k < K; ++k) p.row(k).setConstant(ch.budget(k) / N);

  SolverTrace<PowerMatrix> tr;
  tr.algorithm = "mdp";
  double obj = weighted_sum(w, rate_parallel(ch, p));
  tr.objective_history.push_back(obj);
  for (int it = 1; it <= opts.max_iter; ++it) {
    for (int k = 0; k < K; ++k) {
      Eigen::MatrixXd t = interference_prices(ch, p, w);
      p.row(k) = priced_best_response(ch, p, k, t.row(k).transpose()).transpose();
    }
    double next = weighted_sum(w, rate_parallel(ch, p));
    tr.objective_history.push_back(next);
    tr.iterations = it;
    bool done = next - obj <= opts.tol;
    obj = next;
    if (done) {
      tr.converged = true;
      tr.termination = Termination::converged;
      break;
    }
  }
  tr.final_iterate = p;
  tr.final_rates = rate_parallel(ch, p);
  return tr;
}

}  // namespace icran
