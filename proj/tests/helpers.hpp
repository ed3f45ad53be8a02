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

#include <Eigen/Dense>

#include <random>
#include <vector>

#include "icran/channels.hpp"

namespace testing {

// Two users, unit direct gains, cross power gain alpha.
inline icran::ScalarChannel symmetric2(double alpha, double budget = 1.0) {
  Eigen::MatrixXd g(2, 2);
  g << 1.0, alpha, alpha, 1.0;
  return icran::ScalarChannel::from_power_gains(g, {budget, budget});
}

// Every tone uses the same power gain matrix.
inline icran::ParallelChannel flat_parallel(const Eigen::MatrixXd& g, int tones, double budget = 1.0) {
  return icran::ParallelChannel::from_power_gains(std::vector<Eigen::MatrixXd>(tones, g),
                                                  std::vector<double>(g.rows(), budget));
}

inline bool nondecreasing(const std::vector<double>& h, double slack) {
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i] < h[i - 1] - slack) return false;
  return true;
}

}  // namespace testing

namespace testing {

// Random parallel channel with every cross gain scaled by c.
inline icran::ParallelChannel scaled_parallel(int users, int tones, std::uint64_t seed, double c,
                                              double budget = 1.0) {
  auto raw = icran::gen_parallel(users, tones, seed);
  std::vector<Eigen::MatrixXd> g(tones, Eigen::MatrixXd(users, users));
  for (int n = 0; n < tones; ++n)
    for (int l = 0; l < users; ++l)
      for (int k = 0; k < users; ++k) g[n](l, k) = raw.power_gain(n, l, k) * (l == k ? 1.0 : c);
  return icran::ParallelChannel::from_power_gains(g, std::vector<double>(users, budget));
}

}  // namespace testing

namespace testing {

// Same channel with users relabeled: new user i is old user perm[i].
inline icran::ParallelChannel permute_users(const icran::ParallelChannel& ch, const std::vector<int>& perm) {
  const int K = ch.users();
  const int N = ch.tones();
  std::vector<icran::Complex> g(static_cast<std::size_t>(N) * K * K);
  for (int n = 0; n < N; ++n)
    for (int l = 0; l < K; ++l)
      for (int k = 0; k < K; ++k) g[(static_cast<std::size_t>(n) * K + l) * K + k] = ch.gain(n, perm[l], perm[k]);
  std::vector<double> b(K);
  for (int k = 0; k < K; ++k) b[k] = ch.budget(perm[k]);
  return icran::ParallelChannel(K, N, std::move(g), std::move(b));
}

}  // namespace testing

namespace testing {

// Channel whose crosstalk ratios |H^n_rq|^2/|H^n_qq|^2 are symmetric in
// (q, r) and drawn from [0, max_ratio].
inline icran::ParallelChannel symmetric_crosstalk(int K, int N, std::uint64_t seed, double max_ratio, double budget) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::MatrixXd> g(N, Eigen::MatrixXd(K, K));
  for (int n = 0; n < N; ++n) {
    Eigen::VectorXd direct(K);
    for (int k = 0; k < K; ++k) direct[k] = 0.2 + 2.0 * u(gen);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(K, K);
    for (int q = 0; q < K; ++q)
      for (int r = q + 1; r < K; ++r) c(q, r) = c(r, q) = max_ratio * u(gen);
    for (int r = 0; r < K; ++r)
      for (int q = 0; q < K; ++q) g[n](r, q) = r == q ? direct[q] : c(q, r) * direct[q];
  }
  return icran::ParallelChannel::from_power_gains(g, std::vector<double>(K, budget));
}

}  // namespace testing
