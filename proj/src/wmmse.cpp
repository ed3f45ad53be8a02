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

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "icran/errors.hpp"
#include "icran/wsrm.hpp"
#include "weights.hpp"

namespace icran {

namespace {

// Smallest lambda >= 0 with power(lambda) <= budget, where power is
// decreasing. Zero when the unconstrained point already fits.
template <class Power>
double budget_multiplier(Power power, double budget) {
  if (power(0.0) <= budget) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (power(hi) > budget) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    if (power(mid) > budget) lo = mid; else hi = mid;
  }
  return hi;
}

double log_det_hpd(const Eigen::MatrixXcd& m) {
  Eigen::LLT<Eigen::MatrixXcd> llt(m);
  if (llt.info() == Eigen::Success) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::log(llt.matrixL()(i, i).real());
    return 2.0 * s;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().array().log().sum();
}

Eigen::MatrixXcd hermitian(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

// ---- parallel ----------------------------------------------------------------

WmmseParallelState wmmse_parallel_init(const ParallelChannel& ch) {
  const int K = ch.users();
  const int N = ch.tones();
  WmmseParallelState s;
  s.v.resize(K, N);
  for (int k = 0; k < K; ++k) s.v.row(k).setConstant(std::sqrt(ch.budget(k) / N));
  s.u = Eigen::MatrixXcd::Zero(K, N);
  s.w = Eigen::MatrixXd::Ones(K, N);
  return s;
}

void wmmse_parallel_update_uw(const ParallelChannel& ch, WmmseParallelState& s, Exec exec) {
  const int K = ch.users();
  const int N = ch.tones();
#pragma omp parallel for schedule(static) if (exec == Exec::parallel) num_threads(worker_count())
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < N; ++n) {
      double den = 1.0;
      for (int l = 0; l < K; ++l) den += ch.power_gain(n, l, k) * std::norm(s.v(l, n));
      Complex hv = ch.gain(n, k, k) * s.v(k, n);
      s.u(k, n) = hv / den;
      s.w(k, n) = 1.0 / (1.0 - (std::conj(s.u(k, n)) * hv).real());
    }
}

void wmmse_parallel_update_v(const ParallelChannel& ch, std::span<const double> weights,
                             WmmseParallelState& s, Exec exec) {
  const int K = ch.users();
  const int N = ch.tones();
  Eigen::VectorXd mu = detail::resolve_weights(weights, K);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel) num_threads(worker_count())
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd c(N);
    Eigen::VectorXcd b(N);
    for (int n = 0; n < N; ++n) {
      double acc = 0.0;
      for (int l = 0; l < K; ++l)
        acc += mu[l] * ch.power_gain(n, k, l) * std::norm(s.u(l, n)) * s.w(l, n);
      c[n] = acc;
      b[n] = mu[k] * std::conj(ch.gain(n, k, k)) * s.u(k, n) * s.w(k, n);
    }
    auto power = [&](double lambda) {
      double total = 0.0;
      for (int n = 0; n < N; ++n) {
        if (b[n] == Complex{}) continue;
        double d = c[n] + lambda;
        if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
        total += std::norm(b[n]) / (d * d);
      }
      return total;
    };
    double lambda = budget_multiplier(power, ch.budget(k));
    for (int n = 0; n < N; ++n)
      s.v(k, n) = b[n] == Complex{} ? Complex{} : b[n] / (c[n] + lambda);
  }
}

Eigen::MatrixXd wmmse_parallel_mse(const ParallelChannel& ch, const WmmseParallelState& s) {
  const int K = ch.users();
  const int N = ch.tones();
  Eigen::MatrixXd e(K, N);
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < N; ++n) {
      double rx = 1.0;
      for (int l = 0; l < K; ++l) rx += ch.power_gain(n, l, k) * std::norm(s.v(l, n));
      Complex uhv = std::conj(s.u(k, n)) * ch.gain(n, k, k) * s.v(k, n);
      e(k, n) = std::norm(s.u(k, n)) * rx - 2.0 * uhv.real() + 1.0;
    }
  return e;
}

SolverTrace<PowerMatrix> wmmse_parallel(const ParallelChannel& ch, std::span<const double> weights,
                                        const WmmseOptions& opts) {
  const int K = ch.users();
  Eigen::VectorXd mu = detail::resolve_weights(weights, K);
  if (!(opts.epsilon > 0.0) || opts.max_iter < 1) throw ParameterError("epsilon > 0 and max_iter >= 1");
  std::span<const double> w(mu.data(), K);

  WmmseParallelState s = wmmse_parallel_init(ch);
  SolverTrace<PowerMatrix> tr;
  tr.algorithm = "wmmse";
  tr.objective_history.push_back(weighted_sum(w, rate_parallel(ch, s.v.cwiseAbs2())));
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= opts.max_iter; ++it) {
    wmmse_parallel_update_uw(ch, s, opts.exec);
    double logw = s.w.array().log().sum();
    wmmse_parallel_update_v(ch, w, s, opts.exec);
    tr.objective_history.push_back(weighted_sum(w, rate_parallel(ch, s.v.cwiseAbs2())));
    tr.residual_history.push_back(std::abs(logw - prev));
    tr.iterations = it;
    if (std::abs(logw - prev) <= opts.epsilon) {
      tr.converged = true;
      tr.termination = Termination::converged;
      break;
    }
    prev = logw;
  }
  tr.final_iterate = s.v.cwiseAbs2();
  tr.final_rates = rate_parallel(ch, tr.final_iterate);
  return tr;
}

// ---- MIMO --------------------------------------------------------------------

SolverTrace<BeamformerSet> wmmse_mimo(const MimoChannel& ch, std::span<const int> streams,
                                      std::span<const double> weights, const WmmseOptions& opts,
                                      const std::optional<std::vector<Eigen::MatrixXcd>>& init) {
  const int K = ch.users();
  Eigen::VectorXd mu = detail::resolve_weights(weights, K);
  if (static_cast<int>(streams.size()) != K) throw DimensionError("one stream count per user");
  if (!(opts.epsilon > 0.0) || opts.max_iter < 1) throw ParameterError("epsilon > 0 and max_iter >= 1");
  for (int k = 0; k < K; ++k) {
    const auto& a = ch.antennas(k);
    if (streams[k] < 1 || streams[k] > std::min(a.tx, a.rx))
      throw DimensionError("user " + std::to_string(k) + " requests " + std::to_string(streams[k]) +
                           " streams but min(M, N) = " + std::to_string(std::min(a.tx, a.rx)));
  }
  std::span<const double> wspan(mu.data(), K);

  BeamformerSet bf;
  bf.streams.assign(streams.begin(), streams.end());
  bf.V.resize(K);
  bf.U.resize(K);
  bf.W.resize(K);
  if (init) {
    if (static_cast<int>(init->size()) != K) throw DimensionError("one initial precoder per user");
    for (int k = 0; k < K; ++k) {
      const auto& v = (*init)[k];
      if (v.rows() != ch.antennas(k).tx || v.cols() != streams[k])
        throw DimensionError("initial precoder of user " + std::to_string(k) + " has the wrong shape");
      bf.V[k] = v;
    }
  } else {
    for (int k = 0; k < K; ++k) {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(ch.gain(k, k), Eigen::ComputeFullV);
      bf.V[k] = svd.matrixV().leftCols(streams[k]) * std::sqrt(ch.budget(k) / streams[k]);
    }
  }

  auto objective = [&] {
    return weighted_sum(wspan, rate_mimo(ch, covariances_from_beamformers(bf.V)));
  };

  const bool par = opts.exec == Exec::parallel;
  SolverTrace<BeamformerSet> tr;
  tr.algorithm = "wmmse_mimo";
  tr.objective_history.push_back(objective());
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= opts.max_iter; ++it) {
#pragma omp parallel for schedule(static) if (par) num_threads(worker_count())
    for (int k = 0; k < K; ++k) {
      const int nr = ch.antennas(k).rx;
      Eigen::MatrixXcd j = Eigen::MatrixXcd::Identity(nr, nr);
      for (int l = 0; l < K; ++l) {
        Eigen::MatrixXcd hv = ch.gain(l, k) * bf.V[l];
        j.noalias() += hv * hv.adjoint();
      }
      Eigen::MatrixXcd hv = ch.gain(k, k) * bf.V[k];
      bf.U[k] = hermitian(j).llt().solve(hv);
      const int d = streams[k];
      Eigen::MatrixXcd e = hermitian(Eigen::MatrixXcd::Identity(d, d) - bf.U[k].adjoint() * hv);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(e, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < 1e-12) e += 1e-12 * Eigen::MatrixXcd::Identity(d, d);
      bf.W[k] = hermitian(e.llt().solve(Eigen::MatrixXcd::Identity(d, d)));
    }
    double logw = 0.0;
    for (int k = 0; k < K; ++k) logw += log_det_hpd(bf.W[k]);

#pragma omp parallel for schedule(static) if (par) num_threads(worker_count())
    for (int k = 0; k < K; ++k) {
      const int nt = ch.antennas(k).tx;
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(nt, nt);
      for (int l = 0; l < K; ++l) {
        Eigen::MatrixXcd hu = ch.gain(k, l).adjoint() * bf.U[l];
        a.noalias() += mu[l] * hu * bf.W[l] * hu.adjoint();
      }
      Eigen::MatrixXcd b = mu[k] * ch.gain(k, k).adjoint() * bf.U[k] * bf.W[k];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian(a));
      const Eigen::VectorXd& ev = es.eigenvalues();
      Eigen::MatrixXcd c = es.eigenvectors().adjoint() * b;
      Eigen::VectorXd r = c.rowwise().squaredNorm();
      const double tiny = 1e-14 * std::max(1.0, ev.cwiseAbs().maxCoeff());
      auto power = [&](double lambda) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
          if (r[i] == 0.0) continue;
          double dd = ev[i] + lambda;
          if (!(dd > tiny)) return std::numeric_limits<double>::infinity();
          total += r[i] / (dd * dd);
        }
        return total;
      };
      double lambda = budget_multiplier(power, ch.budget(k));
      Eigen::VectorXd scale(ev.size());
      for (Eigen::Index i = 0; i < ev.size(); ++i)
        scale[i] = r[i] == 0.0 ? 0.0 : 1.0 / (ev[i] + lambda);
      bf.V[k] = es.eigenvectors() * scale.asDiagonal() * c;
    }

    tr.objective_history.push_back(objective());
    tr.residual_history.push_back(std::abs(logw - prev));
    tr.iterations = it;
    if (std::abs(logw - prev) <= opts.epsilon) {
      tr.converged = true;
      tr.termination = Termination::converged;
      break;
    }
    prev = logw;
  }
  tr.final_rates = rate_mimo(ch, covariances_from_beamformers(bf.V));
  tr.final_iterate = std::move(bf);
  return tr;
}

bool utility_admissible(const UtilitySpec& spec) { return spec.kind == UtilityKind::sum_rate; }

}  // namespace icran
