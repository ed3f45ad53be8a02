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

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace icran {

using Complex = std::complex<double>;

// Per-user transmit powers, length K.
using PowerVector = Eigen::VectorXd;
// Per-user, per-tone powers: rows are users, columns are tones.
using PowerMatrix = Eigen::MatrixXd;
// One transmit covariance per user.
using CovarianceSet = std::vector<Eigen::MatrixXcd>;
// One transmit vector per user (MISO).
using BeamVectors = std::vector<Eigen::VectorXcd>;

struct AntennaPair {
  int tx = 1;  // M_k
  int rx = 1;  // N_k

  bool operator==(const AntennaPair&) const = default;
};

// Transmit/receive filters and MMSE weights. W is empty unless the producer
// is WMMSE.
struct BeamformerSet {
  std::vector<Eigen::MatrixXcd> V;
  std::vector<Eigen::MatrixXcd> U;
  std::vector<Eigen::MatrixXcd> W;
  std::vector<int> streams;
};

}  // namespace icran
