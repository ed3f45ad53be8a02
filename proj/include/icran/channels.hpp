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
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "icran/types.hpp"

namespace icran {

// Channel coefficients are indexed (tx, rx): gain(l, k) is the path from
// transmitter l to receiver k. Noise power is 1 at every receiver; SNR only
// enters through the budgets.

class ScalarChannel {
 public:
  ScalarChannel(int users, std::vector<Complex> gains, std::vector<double> budgets);

  // Real channel with the given |H_lk|^2 (row l = transmitter).
  static ScalarChannel from_power_gains(const Eigen::MatrixXd& power_gains,
                                        std::vector<double> budgets);

  int users() const noexcept { return users_; }
  Complex gain(int tx, int rx) const { return gains_[tx * users_ + rx]; }
  double power_gain(int tx, int rx) const { return std::norm(gain(tx, rx)); }
  double budget(int k) const { return budgets_[k]; }
  const std::vector<double>& budgets() const noexcept { return budgets_; }
  const std::vector<Complex>& gains() const noexcept { return gains_; }

  ScalarChannel with_budgets(std::vector<double> budgets) const;

 private:
  int users_;
  std::vector<Complex> gains_;
  std::vector<double> budgets_;
};

class ParallelChannel {
 public:
  ParallelChannel(int users, int tones, std::vector<Complex> gains,
                  std::vector<double> budgets);

  // power_gains[n](l, k) = |H^n_lk|^2.
  static ParallelChannel from_power_gains(const std::vector<Eigen::MatrixXd>& power_gains,
                                          std::vector<double> budgets);

  int users() const noexcept { return users_; }
  int tones() const noexcept { return tones_; }
  Complex gain(int tone, int tx, int rx) const {
    return gains_[(static_cast<std::size_t>(tone) * users_ + tx) * users_ + rx];
  }
  double power_gain(int tone, int tx, int rx) const { return std::norm(gain(tone, tx, rx)); }
  double budget(int k) const { return budgets_[k]; }
  const std::vector<double>& budgets() const noexcept { return budgets_; }
  const std::vector<Complex>& gains() const noexcept { return gains_; }

  ScalarChannel tone(int n) const;
  ParallelChannel with_budgets(std::vector<double> budgets) const;

 private:
  int users_;
  int tones_;
  std::vector<Complex> gains_;
  std::vector<double> budgets_;
};

class MisoChannel {
 public:
  // gains[l * users + k] is the row vector h_lk of length tx_antennas.
  MisoChannel(int users, int tx_antennas, std::vector<Eigen::RowVectorXcd> gains,
              std::vector<double> budgets);

  int users() const noexcept { return users_; }
  int tx_antennas() const noexcept { return tx_antennas_; }
  const Eigen::RowVectorXcd& gain(int tx, int rx) const { return gains_[tx * users_ + rx]; }
  double budget(int k) const { return budgets_[k]; }
  const std::vector<double>& budgets() const noexcept { return budgets_; }
  const std::vector<Eigen::RowVectorXcd>& gains() const noexcept { return gains_; }

  MisoChannel with_budgets(std::vector<double> budgets) const;

 private:
  int users_;
  int tx_antennas_;
  std::vector<Eigen::RowVectorXcd> gains_;
  std::vector<double> budgets_;
};

class MimoChannel {
 public:
  // gains[l * users + k] is H_lk with shape rx(k) x tx(l).
  MimoChannel(std::vector<AntennaPair> antennas, std::vector<Eigen::MatrixXcd> gains,
              std::vector<double> budgets);

  int users() const noexcept { return static_cast<int>(antennas_.size()); }
  const AntennaPair& antennas(int k) const { return antennas_[k]; }
  const std::vector<AntennaPair>& antenna_profile() const noexcept { return antennas_; }
  const Eigen::MatrixXcd& gain(int tx, int rx) const { return gains_[tx * users() + rx]; }
  double budget(int k) const { return budgets_[k]; }
  const std::vector<double>& budgets() const noexcept { return budgets_; }
  const std::vector<Eigen::MatrixXcd>& gains() const noexcept { return gains_; }

  MimoChannel with_budgets(std::vector<double> budgets) const;

 private:
  std::vector<AntennaPair> antennas_;
  std::vector<Eigen::MatrixXcd> gains_;
  std::vector<double> budgets_;
};

enum class ChannelKind { scalar, parallel, miso, mimo };

std::string to_string(ChannelKind kind);
ChannelKind parse_channel_kind(const std::string& name);

using AnyChannel = std::variant<ScalarChannel, ParallelChannel, MisoChannel, MimoChannel>;

struct ChannelDims {
  int users = 1;
  int tones = 1;        // parallel
  int tx_antennas = 1;  // miso, and mimo when antennas is empty
  int rx_antennas = 1;  // mimo when antennas is empty
  std::vector<AntennaPair> antennas;  // per-user mimo profile
};

// CN(0,1) entries, unit budgets. Sampling order is the storage order of each
// type, so a seed fixes every coefficient.
ScalarChannel gen_scalar(int users, std::uint64_t seed);
ParallelChannel gen_parallel(int users, int tones, std::uint64_t seed);
MisoChannel gen_miso(int users, int tx_antennas, std::uint64_t seed);
MimoChannel gen_mimo(std::vector<AntennaPair> antennas, std::uint64_t seed);
AnyChannel gen_channel(ChannelKind kind, const ChannelDims& dims, std::uint64_t seed);

std::vector<double> budgets_from_snr_db(int users, double snr_db);

// ---- evaluators -----------------------------------------------------------

Eigen::VectorXd sinr_scalar(const ScalarChannel& ch, const PowerVector& p);
Eigen::VectorXd rate_scalar(const ScalarChannel& ch, const PowerVector& p);

// K x N per-tone SINR.
Eigen::MatrixXd sinr_parallel(const ParallelChannel& ch, const PowerMatrix& p);
Eigen::VectorXd rate_parallel(const ParallelChannel& ch, const PowerMatrix& p);

Eigen::VectorXd sinr_miso(const MisoChannel& ch, const BeamVectors& v);
Eigen::VectorXd rate_miso(const MisoChannel& ch, const BeamVectors& v);

// log2 det(I + H_kk Q_k H_kk^H J_k^-1) computed as
// log2 det(J_k + H_kk Q_k H_kk^H) - log2 det(J_k) with Cholesky factors.
// Throws DomainError for a non-Hermitian or indefinite Q_k.
Eigen::VectorXd rate_mimo(const MimoChannel& ch, const CovarianceSet& q);

// Per-stream SINR with linear receive filters; other streams of the same
// user count as interference.
std::vector<Eigen::VectorXd> sinr_mimo_stream(const MimoChannel& ch,
                                              const std::vector<Eigen::MatrixXcd>& u,
                                              const std::vector<Eigen::MatrixXcd>& v);

// Throws DomainError unless every Q_k is Hermitian (1e-10) with minimum
// eigenvalue >= -1e-10.
void check_covariances(const MimoChannel& ch, const CovarianceSet& q);
CovarianceSet covariances_from_beamformers(const std::vector<Eigen::MatrixXcd>& v);
CovarianceSet covariances_from_powers(const PowerMatrix& p);

// Diagonal MIMO channel whose tone n becomes antenna n.
MimoChannel embed_parallel_as_mimo(const ParallelChannel& ch);

double weighted_sum(std::span<const double> weights, const Eigen::VectorXd& rates);

}  // namespace icran
