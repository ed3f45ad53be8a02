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

#include "icran/waterfilling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "icran/errors.hpp"
#include "icran/power_control.hpp"

namespace icran {

namespace {

constexpr double kLevelCap = 1e12;

// Floors a_n = npi_n / g_n after validating the inputs.
Eigen::VectorXd floors(const Eigen::VectorXd& g, const Eigen::VectorXd& npi) {
  if (g.size() != npi.size() || g.size() == 0)
    throw DimensionError("gains and npi must have the same nonzero length");
  for (Eigen::Index n = 0; n < g.size(); ++n) {
    if (!(g[n] > 0.0) || !std::isfinite(g[n])) throw DomainError("water-filling gains must be > 0");
    if (!(npi[n] > 0.0) || !std::isfinite(npi[n])) throw DomainError("npi must be > 0");
  }
  return npi.cwiseQuotient(g);
}

Eigen::VectorXd pour(const Eigen::VectorXd& a, double level) {
  return (level - a.array()).max(0.0).matrix();
}

double fm_rate(const Eigen::VectorXd& a, double level) {
  double r = 0.0;
  for (Eigen::Index n = 0; n < a.size(); ++n)
    if (level > a[n]) r += std::log2(level / a[n]);
  return r;
}

void check_matrix(const ParallelChannel& ch, const PowerMatrix& p) {
  if (p.rows() != ch.users() || p.cols() != ch.tones())
    throw DimensionError("power matrix must be users x tones");
}

Eigen::VectorXd direct_gains(const ParallelChannel& ch, int k) {
  Eigen::VectorXd g(ch.tones());
  for (int n = 0; n < ch.tones(); ++n) g[n] = ch.power_gain(n, k, k);
  return g;
}

}  // namespace

Eigen::VectorXd waterfill(const Eigen::VectorXd& g, const Eigen::VectorXd& npi, double budget) {
  Eigen::VectorXd a = floors(g, npi);
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw ParameterError("budget must be >= 0");
  if (budget == 0.0) return Eigen::VectorXd::Zero(a.size());

  double lo = 0.0;
  double hi = a.maxCoeff() + budget;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (pour(a, mid).sum() > budget) hi = mid; else lo = mid;
  }
  double level = 0.5 * (lo + hi);
  for (int pass = 0; pass < 4; ++pass) {
    double s = budget;
    int m = 0;
    for (Eigen::Index n = 0; n < a.size(); ++n)
      if (a[n] < level) {
        s += a[n];
        ++m;
      }
    if (m == 0) break;
    double exact = s / m;
    if (exact == level) break;
    level = exact;
  }
  return pour(a, level);
}

Eigen::VectorXd fm_waterfill(const Eigen::VectorXd& g, const Eigen::VectorXd& npi, double rate,
                             int user) {
  Eigen::VectorXd a = floors(g, npi);
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw ParameterError("rate target must be >= 0");
  if (rate == 0.0) return Eigen::VectorXd::Zero(a.size());

  double lo = a.minCoeff();
  double hi = 2.0 * lo;
  while (fm_rate(a, hi) < rate) {
    lo = hi;
    hi *= 2.0;
    if (hi > kLevelCap)
      throw FeasibilityError("rate target unreachable: water level exceeds cap for user " +
                                 std::to_string(user),
                             std::numeric_limits<double>::quiet_NaN(), user);
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (fm_rate(a, mid) < rate) lo = mid; else hi = mid;
  }
  double level = hi;
  for (int pass = 0; pass < 4; ++pass) {
    double s = rate;
    int m = 0;
    for (Eigen::Index n = 0; n < a.size(); ++n)
      if (a[n] < level) {
        s += std::log2(a[n]);
        ++m;
      }
    if (m == 0) break;
    double exact = std::exp2(s / m);
    if (exact == level) break;
    level = exact;
  }
  return pour(a, level);
}

Eigen::VectorXd measure_npi(const ParallelChannel& ch, const PowerMatrix& p, int k) {
  Eigen::VectorXd npi = Eigen::VectorXd::Ones(ch.tones());
  for (int n = 0; n < ch.tones(); ++n)
    for (int l = 0; l < ch.users(); ++l)
      if (l != k) npi[n] += ch.power_gain(n, l, k) * p(l, n);
  return npi;
}

double ne_residual(const ParallelChannel& ch, const PowerMatrix& p) {
  check_matrix(ch, p);
  double r = 0.0;
  for (int k = 0; k < ch.users(); ++k) {
    Eigen::VectorXd br = waterfill(direct_gains(ch, k), measure_npi(ch, p, k), ch.budget(k));
    r = std::max(r, (p.row(k).transpose() - br).cwiseAbs().maxCoeff());
  }
  return r;
}

SolverTrace<PowerMatrix> iwfa(const ParallelChannel& ch, const IwfaOptions& opts) {
  if (!(opts.damping >= 0.0 && opts.damping < 1.0)) throw ParameterError("damping must be in [0, 1)");
  if (!(opts.tol > 0.0) || opts.max_iter < 1) throw ParameterError("tol > 0 and max_iter >= 1");
  const int K = ch.users();
  const int N = ch.tones();
  std::vector<Eigen::VectorXd> direct(K);
  for (int k = 0; k < K; ++k) direct[k] = direct_gains(ch, k);

  SolverTrace<PowerMatrix> tr;
  tr.algorithm = "iwfa";
  PowerMatrix p = PowerMatrix::Zero(K, N);
  tr.objective_history.push_back(0.0);
  const double th = opts.damping;

  for (int it = 1; it <= opts.max_iter; ++it) {
    if (opts.schedule == Schedule::sequential) {
      for (int k = 0; k < K; ++k) {
        Eigen::VectorXd br = waterfill(direct[k], measure_npi(ch, p, k), ch.budget(k));
        p.row(k) = th * p.row(k) + (1.0 - th) * br.transpose();
      }
    } else {
      PowerMatrix next(K, N);
      const bool par = opts.exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par) num_threads(worker_count())
      for (int k = 0; k < K; ++k) {
        Eigen::VectorXd br = waterfill(direct[k], measure_npi(ch, p, k), ch.budget(k));
        next.row(k) = th * p.row(k) + (1.0 - th) * br.transpose();
      }
      p = next;
    }
    Eigen::VectorXd rates = rate_parallel(ch, p);
    double res = ne_residual(ch, p);
    tr.objective_history.push_back(rates.sum());
    tr.residual_history.push_back(res);
    tr.rate_history.push_back(rates);
    tr.iterations = it;
    if (res < opts.tol) {
      tr.converged = true;
      tr.termination = Termination::converged;
      break;
    }
  }
  tr.final_iterate = p;
  tr.final_rates = rate_parallel(ch, p);
  return tr;
}

Eigen::MatrixXd upsilon_matrix(const ParallelChannel& ch) {
  const int K = ch.users();
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(K, K);
  for (int q = 0; q < K; ++q)
    for (int r = 0; r < K; ++r) {
      if (r == q) continue;
      for (int n = 0; n < ch.tones(); ++n) {
        double d = ch.power_gain(n, q, q);
        if (!(d > 0.0)) throw DegenerateChannelError("zero direct gain for user " + std::to_string(q));
        u(q, r) = std::max(u(q, r), ch.power_gain(n, r, q) / d);
      }
    }
  return u;
}

Certificate cert_simultaneous(const ParallelChannel& ch) {
  double rho = spectral_radius(upsilon_matrix(ch));
  return {rho < 1.0, rho};
}

Certificate cert_sequential(const ParallelChannel& ch) {
  Eigen::MatrixXd u = upsilon_matrix(ch);
  const Eigen::Index K = u.rows();
  Eigen::MatrixXd low = u.triangularView<Eigen::StrictlyLower>();
  Eigen::MatrixXd upp = u.triangularView<Eigen::StrictlyUpper>();
  // I - low is unit lower triangular, so a triangular solve is exact enough.
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(K, K) - low;
  Eigen::MatrixXd m = lhs.triangularView<Eigen::Lower>().solve(upp);
  // (I - L)^-1 has a nonnegative Neumann series only when rho(L) < 1, which
  // always holds for a strictly triangular L; clip the solve's rounding.
  m = m.cwiseMax(0.0);
  double rho = spectral_radius(m);
  return {rho < 1.0, rho};
}

bool cert_symmetric_crosstalk(const ParallelChannel& ch, double tol) {
  const int K = ch.users();
  for (int n = 0; n < ch.tones(); ++n)
    for (int q = 0; q < K; ++q)
      for (int r = q + 1; r < K; ++r) {
        double a = ch.power_gain(n, r, q) / ch.power_gain(n, q, q);
        double b = ch.power_gain(n, q, r) / ch.power_gain(n, r, r);
        if (std::abs(a - b) > tol * std::max({1.0, a, b})) return false;
      }
  return true;
}

bool fm_feasibility_check(const ParallelChannel& ch, std::span<const double> zeta) {
  const int K = ch.users();
  if (static_cast<int>(zeta.size()) != K) throw DimensionError("one rate target per user");
  for (int k = 0; k < K; ++k) {
    if (!(zeta[k] >= 0.0)) throw ParameterError("rate targets must be >= 0");
    if (zeta[k] == 0.0) continue;
    double bound = 1.0 / std::expm1(zeta[k]);
    for (int n = 0; n < ch.tones(); ++n) {
      double s = 0.0;
      for (int l = 0; l < K; ++l)
        if (l != k) s += ch.power_gain(n, k, l) / ch.power_gain(n, k, k);
      if (!(s < bound)) return false;
    }
  }
  return true;
}

SolverTrace<PowerMatrix> fm_iwfa(const ParallelChannel& ch, std::span<const double> zeta,
                                 const FmIwfaOptions& opts) {
  if (!opts.override_feasibility && !fm_feasibility_check(ch, zeta))
    throw FeasibilityError("rate targets fail the fixed-margin feasibility check",
                           std::numeric_limits<double>::quiet_NaN());
  if (static_cast<int>(zeta.size()) != ch.users()) throw DimensionError("one rate target per user");
  if (!(opts.tol > 0.0) || opts.max_iter < 1) throw ParameterError("tol > 0 and max_iter >= 1");
  const int K = ch.users();
  const int N = ch.tones();
  std::vector<Eigen::VectorXd> direct(K);
  for (int k = 0; k < K; ++k) direct[k] = direct_gains(ch, k);

  SolverTrace<PowerMatrix> tr;
  tr.algorithm = "fm_iwfa";
  PowerMatrix p = PowerMatrix::Zero(K, N);
  tr.objective_history.push_back(0.0);
  for (int it = 1; it <= opts.max_iter; ++it) {
    PowerMatrix prev = p;
    if (opts.schedule == Schedule::sequential) {
      for (int k = 0; k < K; ++k)
        p.row(k) = fm_waterfill(direct[k], measure_npi(ch, p, k), zeta[k], k).transpose();
    } else {
      PowerMatrix next(K, N);
      for (int k = 0; k < K; ++k)
        next.row(k) = fm_waterfill(direct[k], measure_npi(ch, prev, k), zeta[k], k).transpose();
      p = next;
    }
    double res = (p - prev).cwiseAbs().maxCoeff();
    tr.objective_history.push_back(p.sum());
    tr.residual_history.push_back(res);
    tr.rate_history.push_back(rate_parallel(ch, p));
    tr.iterations = it;
    if (!p.allFinite() || p.maxCoeff() > kLevelCap) {
      tr.termination = Termination::diverged;
      break;
    }
    if (res < opts.tol * std::max(1.0, p.cwiseAbs().maxCoeff())) {
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
