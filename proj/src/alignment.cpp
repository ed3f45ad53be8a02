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

#include "icran/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "icran/errors.hpp"
#include "icran/rng.hpp"

namespace icran {

namespace {

void normalize_phase(Eigen::MatrixXcd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    auto col = m.col(c);
    const double floor = 1e-14 * col.norm();
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      double a = std::abs(col[r]);
      if (a > floor) {
        col *= std::conj(col[r]) / a;
        col[r] = Complex(a, 0.0);
        break;
      }
    }
  }
}

Eigen::MatrixXcd smallest_eigenvectors(const Eigen::MatrixXcd& q, int d) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (q + q.adjoint()));
  Eigen::MatrixXcd out = es.eigenvectors().leftCols(d);
  normalize_phase(out);
  return out;
}

std::vector<double> resolve_powers(const std::vector<double>& p, int users) {
  if (p.empty()) return std::vector<double>(users, 1.0);
  if (static_cast<int>(p.size()) != users) throw DimensionError("one power per user");
  for (double x : p)
    if (!(x > 0.0)) throw ParameterError("alignment powers must be > 0");
  return p;
}

void check_streams(const MimoChannel& ch, const std::vector<int>& d) {
  if (static_cast<int>(d.size()) != ch.users()) throw DimensionError("one stream count per user");
  for (int k = 0; k < ch.users(); ++k) {
    const auto& a = ch.antennas(k);
    if (d[k] < 0 || d[k] > std::min(a.tx, a.rx))
      throw DimensionError("user " + std::to_string(k) + " needs 0 <= d <= min(M, N)");
  }
}

}  // namespace

void DofProfile::validate() const {
  if (d.size() != antennas.size()) throw DimensionError("one antenna pair per user");
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] < 0) throw ParameterError("DoF must be >= 0");
    if (antennas[k].tx < 1 || antennas[k].rx < 1) throw DimensionError("antenna counts must be >= 1");
  }
}

double ia_leakage(const MimoChannel& ch, const std::vector<Eigen::MatrixXcd>& u,
                  const std::vector<Eigen::MatrixXcd>& v, const std::vector<double>& powers) {
  const int K = ch.users();
  std::vector<double> p = resolve_powers(powers, K);
  double total = 0.0;
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < K; ++j) {
      if (j == k || v[j].cols() == 0 || u[k].cols() == 0) continue;
      total += p[j] / v[j].cols() * (u[k].adjoint() * ch.gain(j, k) * v[j]).squaredNorm();
    }
  return total;
}

AlignmentResult ia_altmin(const MimoChannel& ch, const std::vector<int>& d, const IaOptions& opts) {
  check_streams(ch, d);
  if (opts.max_iter < 1 || !(opts.tol > 0.0)) throw ParameterError("max_iter >= 1 and tol > 0");
  const int K = ch.users();
  std::vector<double> p = resolve_powers(opts.powers, K);

  AlignmentResult res;
  res.U.resize(K);
  res.V.resize(K);
  Rng rng(opts.seed);
  for (int k = 0; k < K; ++k) {
    const int m = ch.antennas(k).tx;
    Eigen::MatrixXcd a(m, d[k]);
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      for (Eigen::Index r = 0; r < m; ++r) a(r, c) = rng.complex_gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    res.V[k] = qr.householderQ() * Eigen::MatrixXcd::Identity(m, d[k]);
    normalize_phase(res.V[k]);
    res.U[k] = Eigen::MatrixXcd::Zero(ch.antennas(k).rx, d[k]);
  }

  auto record = [&] {
    double leak = ia_leakage(ch, res.U, res.V, p);
    res.leakage_history.push_back(leak);
    return leak < opts.tol;
  };

  for (int it = 1; it <= opts.max_iter && !res.converged; ++it) {
    res.iterations = it;
    for (int k = 0; k < K; ++k) {
      const int nr = ch.antennas(k).rx;
      Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(nr, nr);
      for (int j = 0; j < K; ++j) {
        if (j == k || d[j] == 0) continue;
        Eigen::MatrixXcd hv = ch.gain(j, k) * res.V[j];
        q.noalias() += (p[j] / d[j]) * hv * hv.adjoint();
      }
      res.U[k] = smallest_eigenvectors(q, d[k]);
    }
    if (record()) {
      res.converged = true;
      break;
    }
    for (int j = 0; j < K; ++j) {
      const int nt = ch.antennas(j).tx;
      Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(nt, nt);
      if (d[j] > 0)
        for (int k = 0; k < K; ++k) {
          if (k == j) continue;
          Eigen::MatrixXcd hu = ch.gain(j, k).adjoint() * res.U[k];
          q.noalias() += (p[j] / d[j]) * hu * hu.adjoint();
        }
      res.V[j] = smallest_eigenvectors(q, d[j]);
    }
    if (record()) res.converged = true;
  }
  IaResidual r = ia_residual(ch, res.U, res.V, d);
  res.residual = r.max_crossterm;
  res.rank_ok = r.rank_ok;
  return res;
}

IaResidual ia_residual(const MimoChannel& ch, const std::vector<Eigen::MatrixXcd>& u,
                       const std::vector<Eigen::MatrixXcd>& v, const std::vector<int>& d) {
  check_streams(ch, d);
  const int K = ch.users();
  if (static_cast<int>(u.size()) != K || static_cast<int>(v.size()) != K)
    throw DimensionError("one U and one V per user");
  IaResidual out;
  out.ranks.resize(K);
  out.rank_ok = true;
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < K; ++j) {
      if (j == k || u[k].cols() == 0 || v[j].cols() == 0) continue;
      out.max_crossterm =
          std::max(out.max_crossterm, (u[k].adjoint() * ch.gain(j, k) * v[j]).cwiseAbs().maxCoeff());
    }
    int rank = 0;
    if (u[k].cols() > 0 && v[k].cols() > 0) {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(u[k].adjoint() * ch.gain(k, k) * v[k]);
      const auto& s = svd.singularValues();
      if (s.size() > 0 && s[0] > 0.0)
        for (Eigen::Index i = 0; i < s.size(); ++i)
          if (s[i] > 1e-8 * s[0]) ++rank;
    }
    out.ranks[k] = rank;
    if (rank != d[k]) out.rank_ok = false;
  }
  return out;
}

FeasibilityVerdict feasibility_necessary(const DofProfile& prof, Exec exec) {
  prof.validate();
  const int K = prof.users();
  const auto& d = prof.d;
  const auto& a = prof.antennas;
  FeasibilityVerdict out;
  out.i1 = true;
  for (int k = 0; k < K; ++k)
    if (std::min(a[k].tx, a[k].rx) < d[k]) out.i1 = false;
  out.i2 = true;
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < K; ++j)
      if (j != k && std::max(a[k].tx, a[j].rx) < d[k] + d[j]) out.i2 = false;

  for (int k = 0; k < K; ++k)
    for (int j = 0; j < K; ++j)
      if (j != k) out.pairs.emplace_back(k, j);
  const int np = static_cast<int>(out.pairs.size());
  if (np > 20)
    throw CapabilityError("counting check enumerates 2^" + std::to_string(np) +
                          " subsets; only K(K - 1) <= 20 is supported");

  std::vector<long long> tx_term(K), rx_term(K);
  for (int k = 0; k < K; ++k) {
    tx_term[k] = static_cast<long long>(a[k].tx - d[k]) * d[k];
    rx_term[k] = static_cast<long long>(a[k].rx - d[k]) * d[k];
  }
  const long long count = 1LL << np;
  long long best = count;
#pragma omp parallel for schedule(static) if (exec == Exec::parallel) num_threads(worker_count()) \
    reduction(min : best)
  for (long long mask = 1; mask < count; ++mask) {
    unsigned ks = 0, js = 0;
    long long rhs = 0;
    for (int b = 0; b < np; ++b)
      if (mask >> b & 1) {
        auto [k, j] = out.pairs[b];
        ks |= 1u << k;
        js |= 1u << j;
        rhs += static_cast<long long>(d[k]) * d[j];
      }
    long long lhs = 0;
    for (int k = 0; k < K; ++k) {
      if (ks >> k & 1u) lhs += tx_term[k];
      if (js >> k & 1u) lhs += rx_term[k];
    }
    if (lhs < rhs) best = std::min(best, mask);
  }
  out.counting = best == count;
  if (!out.counting) out.violating_subset = static_cast<std::uint64_t>(best);
  return out;
}

DofBounds dof_bounds(const DofProfile& prof) {
  prof.validate();
  const int K = prof.users();
  if (K < 1) throw DimensionError("profile needs at least one user");
  DofBounds b;
  double total = 0.0;
  for (const auto& a : prof.antennas) total += a.tx + a.rx;
  b.equal_d_bound = total / (static_cast<double>(K) * (K + 1));
  const int s = prof.antennas[0].tx + prof.antennas[0].rx;
  b.constant_sum = std::all_of(prof.antennas.begin(), prof.antennas.end(),
                               [s](const AntennaPair& a) { return a.tx + a.rx == s; });
  if (b.constant_sum) {
    long long sum = 0, sq = 0;
    for (int x : prof.d) {
      sum += x;
      sq += static_cast<long long>(x) * x;
    }
    b.sum_bound = s;
    b.quadratic_holds = sum * sum + sq <= s * sum;
    b.sum_holds = sum < s;
  }
  return b;
}

bool symmetric_feasible(int m, int d, int k) {
  if (m < 1 || d < 0 || k < 1) throw ParameterError("need M >= 1, d >= 0, K >= 1");
  return 2 * m >= d * (k + 1);
}

}  // namespace icran
