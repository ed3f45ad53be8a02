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

#include <cstdint>
#include <optional>
#include <vector>

#include "icran/channels.hpp"
#include "icran/parallel.hpp"

namespace icran {

struct DofProfile {
  std::vector<int> d;
  std::vector<AntennaPair> antennas;  // (M_k, N_k) = (tx, rx)

  int users() const { return static_cast<int>(d.size()); }
  void validate() const;
};

struct IaOptions {
  int max_iter = 10'000;
  double tol = 1e-10;        // total leakage
  std::uint64_t seed = 0;    // random orthonormal start for V
  std::vector<double> powers;  // p_j, empty means all ones
};

struct AlignmentResult {
  std::vector<Eigen::MatrixXcd> U;
  std::vector<Eigen::MatrixXcd> V;
  std::vector<double> leakage_history;  // one entry per half-step
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // max |U_k^H H_jk V_j| over j != k
  bool rank_ok = false;
};

/// Alternating minimization of total leakage. Each half-step takes the
/// eigenvectors of the d_k smallest eigenvalues of the interference
/// covariance, first at the receivers and then at the transmitters on the
/// reciprocal channel. Columns are phase-normalized so the first nonzero
/// entry is real and positive.
AlignmentResult ia_altmin(const MimoChannel& ch, const std::vector<int>& d,
                          const IaOptions& opts = {});

/// Total leakage sum_k Tr(U_k^H Q_k U_k).
double ia_leakage(const MimoChannel& ch, const std::vector<Eigen::MatrixXcd>& u,
                  const std::vector<Eigen::MatrixXcd>& v, const std::vector<double>& powers = {});

struct IaResidual {
  double max_crossterm = 0.0;
  std::vector<int> ranks;
  bool rank_ok = false;
};

IaResidual ia_residual(const MimoChannel& ch, const std::vector<Eigen::MatrixXcd>& u,
                       const std::vector<Eigen::MatrixXcd>& v, const std::vector<int>& d);

struct FeasibilityVerdict {
  bool i1 = false;
  bool i2 = false;
  bool counting = false;
  // Smallest violating subset as a bitmask over the ordered pairs (k, j),
  // k != j, enumerated k-major; bit b is pair b.
  std::optional<std::uint64_t> violating_subset;
  std::vector<std::pair<int, int>> pairs;  // bit order of the mask
  bool feasible() const { return i1 && i2 && counting; }
};

/// Necessary conditions for linear alignment. The counting inequality is
/// checked on every subset of pairs; throws CapabilityError when
/// K(K - 1) > 20.
FeasibilityVerdict feasibility_necessary(const DofProfile& profile, Exec exec = Exec::serial);

struct DofBounds {
  double equal_d_bound = 0.0;  // sum_k (M_k + N_k) / (K (K + 1))
  bool constant_sum = false;   // M_k + N_k identical for every k
  double sum_bound = 0.0;      // M + N when constant_sum
  bool quadratic_holds = false;
  bool sum_holds = false;
};

DofBounds dof_bounds(const DofProfile& profile);

/// 2M >= d (K + 1).
bool symmetric_feasible(int m, int d, int k);

}  // namespace icran
