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
#include <limits>
#include <numbers>

#include "icran/errors.hpp"
#include "icran/wsrm.hpp"

namespace icran {

namespace {

Eigen::VectorXcd project_ball(const Eigen::VectorXcd& x, double budget) {
  double n2 = x.squaredNorm();
  if (n2 <= budget) return x;
  return x * std::sqrt(budget / n2);
}

// Utility with domain failures (a rate hitting zero under a logarithm)
// mapped to -inf so a line search simply rejects the point.
double safe_utility(const UtilitySpec& spec, const MisoChannel& ch, const BeamVectors& v) {
  try {
    return evaluate(spec, rate_miso(ch, v));
  } catch (const DomainError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

Eigen::VectorXcd cca_gradient(const MisoChannel& ch, const UtilitySpec& spec, const BeamVectors& v,
                              int k) {
  const int K = ch.users();
  if (static_cast<int>(v.size()) != K) throw DimensionError("one beam vector per user");
  if (k < 0 || k >= K) throw DimensionError("user index out of range");
  Eigen::VectorXd du = marginal_utility(spec, rate_miso(ch, v));
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(ch.tx_antennas());
  for (int l = 0; l < K; ++l) {
    double total = 1.0;
    for (int j = 0; j < K; ++j) total += std::norm((ch.gain(j, l) * v[j]).value());
    double coef = 1.0 / total;
    if (l != k) coef -= 1.0 / (total - std::norm((ch.gain(l, l) * v[l]).value()));
    const Eigen::RowVectorXcd& h = ch.gain(k, l);
    Complex hv = (h * v[k]).value();
    g += (du[l] * coef * 2.0 / std::numbers::ln2) * h.adjoint() * hv;
  }
  return g;
}

SolverTrace<BeamVectors> cca_miso(const MisoChannel& ch, const UtilitySpec& spec,
                                  const CcaOptions& opts) {
  const int K = ch.users();
  if (!spec.smooth()) throw NonSmoothError("CCA needs a differentiable utility; min-rate is not");
  spec.validate(K);
  if (!(opts.armijo_c > 0.0 && opts.armijo_c < 1.0) || !(opts.shrink > 0.0 && opts.shrink < 1.0) ||
      !(opts.tol > 0.0) || opts.max_iter < 1)
    throw ParameterError("armijo_c and shrink in (0, 1), tol > 0, max_iter >= 1");

  BeamVectors v(K);
  for (int k = 0; k < K; ++k) {
    const Eigen::RowVectorXcd& h = ch.gain(k, k);
    double nh = h.norm();
    if (!(nh > 0.0)) throw DegenerateChannelError("zero direct channel for user " + std::to_string(k));
    v[k] = h.adjoint() * (std::sqrt(ch.budget(k)) / nh);
  }

  SolverTrace<BeamVectors> tr;
  tr.algorithm = "cca";
  double util = safe_utility(spec, ch, v);
  tr.objective_history.push_back(util);
  for (int it = 1; it <= opts.max_iter; ++it) {
    double worst = 0.0;
    for (int k = 0; k < K; ++k) {
      Eigen::VectorXcd g = cca_gradient(ch, spec, v, k);
      Eigen::VectorXcd d = project_ball(v[k] + g, ch.budget(k)) - v[k];
      double nd = d.norm();
      worst = std::max(worst, nd);
      if (nd < opts.tol) continue;
      double slope = g.dot(d).real();
      Eigen::VectorXcd keep = v[k];
      double step = 1.0;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        v[k] = keep + step * d;
        double trial = safe_utility(spec, ch, v);
        if (trial >= util + opts.armijo_c * step * slope) {
          util = trial;
          accepted = true;
          break;
        }
        step *= opts.shrink;
      }
      if (!accepted) v[k] = keep;
    }
    tr.objective_history.push_back(util);
    tr.residual_history.push_back(worst);
    tr.iterations = it;
    if (worst < opts.tol) {
      tr.converged = true;
      tr.termination = Termination::converged;
      break;
    }
  }
  tr.final_rates = rate_miso(ch, v);
  tr.final_iterate = std::move(v);
  return tr;
}

}  // namespace icran
