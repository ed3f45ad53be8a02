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

#include "icran/power_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "icran/errors.hpp"

namespace icran {

namespace {

void check_targets(const ScalarChannel& ch, std::span<const double> g) {
  if (static_cast<int>(g.size()) != ch.users()) throw DimensionError("one SINR target per user");
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!(g[k] >= 0.0) || !std::isfinite(g[k]))
      throw ParameterError("SINR target of user " + std::to_string(k) + " must be >= 0");
}

double direct_gain(const ScalarChannel& ch, int k) {
  double g = ch.power_gain(k, k);
  if (!(g > 0.0)) throw DegenerateChannelError("zero direct gain for user " + std::to_string(k));
  return g;
}

}  // namespace

double spectral_radius(const Eigen::MatrixXd& m, double rel_tol, int max_iter) {
  if (m.rows() != m.cols()) throw DimensionError("spectral_radius needs a square matrix");
  const Eigen::Index n = m.rows();
  if (n == 0) return 0.0;
  if (!m.allFinite() || (m.array() < 0.0).any())
    throw DomainError("spectral_radius needs a finite nonnegative matrix");
  const double shift = 0.5 * m.rowwise().sum().maxCoeff();
  if (shift == 0.0) return 0.0;

  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double hi = std::numeric_limits<double>::infinity();
  double lo = 0.0;
  double prev_est = 0.0;
  int still = 0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd y = m * x + shift * x;
    double lo_s = std::numeric_limits<double>::infinity();
    double hi_s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = y[i] / x[i];
      lo_s = std::min(lo_s, r);
      hi_s = std::max(hi_s, r);
    }
    lo = std::max(lo, lo_s - shift);
    hi = std::min(hi, hi_s - shift);
    if (hi - lo <= rel_tol * hi) return 0.5 * (lo + hi);

    double est = y.norm() / x.norm() - shift;
    if (std::abs(est - prev_est) <= 1e-15 * (est + shift)) {
      if (++still >= 50) return std::clamp(est, lo, hi);
    } else {
      still = 0;
    }
    prev_est = est;

    x = y / y.maxCoeff();
    // Entries can underflow on reducible matrices; keep x strictly positive.
    for (Eigen::Index i = 0; i < n; ++i) x[i] = std::max(x[i], 1e-300);
  }
  return hi;
}

Eigen::MatrixXd gain_ratio_matrix(const ScalarChannel& ch) {
  const int K = ch.users();
  Eigen::MatrixXd z(K, K);
  for (int k = 0; k < K; ++k) {
    double d = direct_gain(ch, k);
    for (int l = 0; l < K; ++l) z(k, l) = ch.power_gain(l, k) / d;
  }
  return z;
}

Eigen::MatrixXd target_gain_matrix(const ScalarChannel& ch, std::span<const double> g) {
  check_targets(ch, g);
  const int K = ch.users();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(K, K);
  for (int k = 0; k < K; ++k) {
    double d = direct_gain(ch, k);
    for (int l = 0; l < K; ++l)
      if (l != k) a(k, l) = g[k] * ch.power_gain(l, k) / d;
  }
  return a;
}

double maxmin_sinr_optimum(const ScalarChannel& ch) {
  if (ch.users() < 2) throw DimensionError("max-min SINR needs at least two users");
  double rho = spectral_radius(gain_ratio_matrix(ch));
  if (rho <= 1.0 + 1e-12)
    throw DegenerateChannelError("no cross gains: max-min SINR is unbounded");
  return 1.0 / (rho - 1.0);
}

PowerVector apc_step(const ScalarChannel& ch, const PowerVector& p, double gamma_star,
                     double beta) {
  const int K = ch.users();
  if (p.size() != K) throw DimensionError("power vector length must equal users");
  if (beta < 0.0 || !std::isfinite(beta)) throw ParameterError("APC step size must be >= 0");
  if (beta == 0.0) return p;
  PowerVector out(K);
  for (int k = 0; k < K; ++k) {
    double g = direct_gain(ch, k);
    double den = 1.0;
    for (int l = 0; l < K; ++l)
      if (l != k) den += ch.power_gain(l, k) * p[l];
    double sinr = g * p[k] / den;
    out[k] = std::max(0.0, p[k] - beta * (sinr - gamma_star) * den / g);
  }
  return out;
}

FeasibilityReport minpower_feasible(const ScalarChannel& ch, std::span<const double> g) {
  double rho = spectral_radius(target_gain_matrix(ch, g));
  return {rho < 1.0, rho};
}

PowerVector minpower_closed_form(const ScalarChannel& ch, std::span<const double> g) {
  Eigen::MatrixXd a = target_gain_matrix(ch, g);
  double rho = spectral_radius(a);
  if (!(rho < 1.0)) throw FeasibilityError("SINR targets infeasible: rho(A) >= 1", rho);
  const int K = ch.users();
  Eigen::VectorXd b(K);
  for (int k = 0; k < K; ++k) b[k] = g[k] / ch.power_gain(k, k);
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(K, K) - a;
  PowerVector p = lhs.partialPivLu().solve(b);
  // (I - A)^-1 is nonnegative; clear rounding noise below zero.
  return p.cwiseMax(0.0);
}

SolverTrace<PowerVector> yates_fixed_point(const ScalarChannel& ch, std::span<const double> g,
                                           const PowerVector& p0, const YatesOptions& opts) {
  check_targets(ch, g);
  const int K = ch.users();
  if (p0.size() != K) throw DimensionError("initial power vector length must equal users");
  if (opts.tol <= 0.0 || opts.max_iter < 1) throw ParameterError("tol > 0 and max_iter >= 1");
  Eigen::VectorXd direct(K);
  for (int k = 0; k < K; ++k) direct[k] = direct_gain(ch, k);

  SolverTrace<PowerVector> tr;
  tr.algorithm = "yates";
  std::vector<PowerVector> iterates{p0};
  tr.objective_history.push_back(p0.sum());
  PowerVector p = p0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    PowerVector next(K);
    for (int k = 0; k < K; ++k) {
      double den = 1.0;
      for (int l = 0; l < K; ++l)
        if (l != k) den += ch.power_gain(l, k) * p[l];
      next[k] = g[k] * den / direct[k];
    }
    double step = (next - p).cwiseAbs().maxCoeff();
    p = next;
    iterates.push_back(p);
    tr.objective_history.push_back(p.sum());
    tr.iterations = it;
    if (!p.allFinite() || p.cwiseAbs().maxCoeff() > opts.divergence) {
      tr.termination = Termination::diverged;
      break;
    }
    if (step <= opts.tol) {
      tr.converged = true;
      tr.termination = Termination::converged;
      break;
    }
  }
  tr.final_iterate = p;
  tr.final_rates = rate_scalar(ch, p);
  tr.residual_history.reserve(iterates.size());
  for (const auto& q : iterates) tr.residual_history.push_back((q - p).cwiseAbs().maxCoeff());
  return tr;
}

double estimate_contraction(const std::vector<double>& d, double floor) {
  // Skip the transient: start once the distance has dropped below 1e-2 of
  // the first one, or at the first iterate if it never does.
  std::size_t end = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > floor) end = i;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= end && i < d.size(); ++i)
    if (d[i] < 1e-2 * d[0]) {
      start = i;
      break;
    }
  if (end - start < 2) start = 0;
  if (end <= start || d[start] <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::pow(d[end] / d[start], 1.0 / static_cast<double>(end - start));
}

}  // namespace icran
