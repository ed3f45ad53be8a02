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

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/lambert_w.hpp>

#include "icran/errors.hpp"
#include "icran/wsrm.hpp"
#include "weights.hpp"

namespace icran {

namespace {

constexpr double kZ0Floor = 1e-12;
constexpr double kLogFloor = -1000.0;  // keeps 2^x away from denormals

using boost::math::lambert_w0;

template <class Derived>
auto pow2(const Eigen::MatrixBase<Derived>& m) {
  return m.unaryExpr([](double v) { return std::exp2(v); });
}

// W(e^z), finite for every finite z.
double lambert_w_exp(double z) {
  if (z < 700.0) return lambert_w0(std::exp(z));
  double w = z - std::log(z);
  for (int it = 0; it < 50; ++it) {
    double step = (w + std::log(w) - z) / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= 1e-16 * w) break;
  }
  return w;
}

// Euclidean projection of y onto {x : sum_n 2^x_n <= budget}. The KKT
// conditions give x_n = y_n - W(s 2^y_n) / ln 2 with s > 0 the root of
// sum_n W(s a_n) = s budget, a_n = 2^y_n.
Eigen::VectorXd project_log_budget(const Eigen::VectorXd& y, double budget) {
  if (pow2(y).sum() <= budget) return y.cwiseMax(kLogFloor);
  const double ln2 = std::numbers::ln2;
  auto psi = [&](double s, double* slope) {
    double f = -s * budget;
    double df = -budget;
    const double ls = std::log(s);
    for (Eigen::Index n = 0; n < y.size(); ++n) {
      double w = lambert_w_exp(ls + y[n] * ln2);
      f += w;
      df += w / (s * (1.0 + w));
    }
    if (slope) *slope = df;
    return f;
  };
  // psi is concave with psi(0) = 0 and psi'(0) > 0; Newton from a point
  // right of the root decreases monotonically onto it.
  double s = 1.0 / budget;
  while (psi(s, nullptr) >= 0.0) s *= 2.0;
  for (int it = 0; it < 100; ++it) {
    double slope = 0.0;
    double f = psi(s, &slope);
    if (!(slope < 0.0)) break;
    double next = s - f / slope;
    if (!(next > 0.0) || !(next < s)) break;
    bool small = s - next <= 1e-15 * s;
    s = next;
    if (small) break;
  }
  Eigen::VectorXd x(y.size());
  for (Eigen::Index n = 0; n < y.size(); ++n)
    x[n] = std::max(kLogFloor, y[n] - lambert_w_exp(std::log(s) + y[n] * ln2) / ln2);
  // Rounding in the root can leave the sum a few ulps over the budget.
  double total = pow2(x).sum();
  if (total > budget) x.array() -= std::log2(total / budget);
  return x;
}

struct Surrogate {
  const ParallelChannel& ch;
  const ScaleParams& sp;
  const Eigen::VectorXd& mu;

  // Interference plus noise I(j, m) for powers 2^x.
  Eigen::MatrixXd npi(const Eigen::MatrixXd& p) const {
    const int K = ch.users();
    const int N = ch.tones();
    Eigen::MatrixXd out = Eigen::MatrixXd::Ones(K, N);
    for (int m = 0; m < N; ++m)
      for (int j = 0; j < K; ++j)
        for (int l = 0; l < K; ++l)
          if (l != j) out(j, m) += ch.power_gain(m, l, j) * p(l, m);
    return out;
  }

  double value(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd p = pow2(x);
    Eigen::MatrixXd in = npi(p);
    double f = 0.0;
    for (int k = 0; k < ch.users(); ++k) {
      double acc = 0.0;
      for (int n = 0; n < ch.tones(); ++n)
        acc += sp.alpha(k, n) * (std::log2(ch.power_gain(n, k, k)) + x(k, n) - std::log2(in(k, n))) +
               sp.beta(k, n);
      f += mu[k] * acc;
    }
    return f;
  }

  Eigen::MatrixXd gradient(const Eigen::MatrixXd& x) const {
    const int K = ch.users();
    const int N = ch.tones();
    Eigen::MatrixXd p = pow2(x);
    Eigen::MatrixXd in = npi(p);
    Eigen::MatrixXd g(K, N);
    for (int m = 0; m < N; ++m)
      for (int k = 0; k < K; ++k) {
        double acc = 0.0;
        for (int j = 0; j < K; ++j)
          if (j != k) acc += mu[j] * sp.alpha(j, m) * ch.power_gain(m, k, j) / in(j, m);
        g(k, m) = mu[k] * sp.alpha(k, m) - p(k, m) * acc;
      }
    return g;
  }
};

}  // namespace

std::pair<double, double> log_bound_params(double z0) {
  double z = std::max(z0, kZ0Floor);
  double a = z / (1.0 + z);
  double b = std::log1p(z) / std::numbers::ln2 - a * std::log2(z);
  return {a, b};
}

ScaleParams scale_params(const ParallelChannel& ch, const PowerMatrix& p) {
  Eigen::MatrixXd z = sinr_parallel(ch, p);
  ScaleParams sp{Eigen::MatrixXd(z.rows(), z.cols()), Eigen::MatrixXd(z.rows(), z.cols())};
  for (Eigen::Index k = 0; k < z.rows(); ++k)
    for (Eigen::Index n = 0; n < z.cols(); ++n) {
      auto [a, b] = log_bound_params(z(k, n));
      sp.alpha(k, n) = a;
      sp.beta(k, n) = b;
    }
  return sp;
}

double scale_surrogate(const ParallelChannel& ch, const ScaleParams& sp, const PowerMatrix& p,
                       std::span<const double> weights) {
  Eigen::VectorXd mu = detail::resolve_weights(weights, ch.users());
  Eigen::MatrixXd x = p.array().log2();
  return Surrogate{ch, sp, mu}.value(x);
}

SolverTrace<PowerMatrix> scale_solve(const ParallelChannel& ch, std::span<const double> weights,
                                     const ScaleOptions& opts) {
  const int K = ch.users();
  const int N = ch.tones();
  Eigen::VectorXd mu = detail::resolve_weights(weights, K);
  if (!(opts.tol > 0.0) || opts.max_iter < 1 || opts.grad_steps < 1 || opts.step_size < 0.0)
    throw ParameterError("tol > 0, max_iter >= 1, grad_steps >= 1, step_size >= 0");
  for (int k = 0; k < K; ++k)
    if (!(ch.budget(k) > 0.0)) throw ParameterError("SCALE needs positive budgets");
  std::span<const double> w(mu.data(), K);

  PowerMatrix p(K, N);
  for (int k = 0; k < K; ++k) p.row(k).setConstant(ch.budget(k) / N);
  Eigen::MatrixXd x = p.array().log2();

  auto project = [&](const Eigen::MatrixXd& y) {
    Eigen::MatrixXd out(K, N);
    for (int k = 0; k < K; ++k)
      out.row(k) = project_log_budget(y.row(k).transpose(), ch.budget(k)).transpose();
    return out;
  };

  SolverTrace<PowerMatrix> tr;
  tr.algorithm = "scale";
  double obj = weighted_sum(w, rate_parallel(ch, p));
  tr.objective_history.push_back(obj);
  double step = opts.step_size > 0.0 ? opts.step_size : 0.1 / mu.maxCoeff();
  const double c = 1e-4;

  for (int it = 1; it <= opts.max_iter; ++it) {
    ScaleParams sp = scale_params(ch, p);
    Surrogate sur{ch, sp, mu};
    double f = sur.value(x);
    for (int g_step = 0; g_step < opts.grad_steps; ++g_step) {
      Eigen::MatrixXd grad = sur.gradient(x);
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        Eigen::MatrixXd trial = project(x + step * grad);
        double ft = sur.value(trial);
        double lin = (grad.array() * (trial - x).array()).sum();
        if (ft >= f + c * lin && ft >= f) {
          moved = (trial - x).cwiseAbs().maxCoeff() > 1e-12;
          x = trial;
          f = ft;
          step *= 2.0;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    p = pow2(x);
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
