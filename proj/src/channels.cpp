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

#include "icran/channels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "icran/errors.hpp"
#include "icran/rng.hpp"

namespace icran {

namespace {

void check_budgets(const std::vector<double>& budgets, int users) {
  if (static_cast<int>(budgets.size()) != users)
    throw DimensionError("expected " + std::to_string(users) + " budgets, got " +
                         std::to_string(budgets.size()));
  for (std::size_t k = 0; k < budgets.size(); ++k)
    if (!std::isfinite(budgets[k]) || budgets[k] <= 0.0)
      throw ParameterError("budget of user " + std::to_string(k) + " must be finite and > 0");
}

void check_finite(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw ParameterError("channel coefficient is not finite");
}

std::vector<double> unit_budgets(int users) { return std::vector<double>(users, 1.0); }

// SINR denominator helper shared by the scalar and parallel evaluators.
template <class PowerGain>
double interference_plus_noise(int users, int rx, PowerGain&& g, const auto& power) {
  double den = 1.0;
  for (int l = 0; l < users; ++l)
    if (l != rx) den += g(l) * power(l);
  return den;
}

// Sum of log-diagonal of the Cholesky factor of a Hermitian PD matrix.
double log2_det_hpd(const Eigen::MatrixXcd& m) {
  Eigen::LLT<Eigen::MatrixXcd> llt(m);
  if (llt.info() != Eigen::Success) throw DomainError("matrix is not positive definite");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) acc += std::log2(llt.matrixL()(i, i).real());
  return 2.0 * acc;
}

}  // namespace

// ---- ScalarChannel --------------------------------------------------------

ScalarChannel::ScalarChannel(int users, std::vector<Complex> gains, std::vector<double> budgets)
    : users_(users), gains_(std::move(gains)), budgets_(std::move(budgets)) {
  if (users_ < 1) throw DimensionError("scalar channel needs K >= 1");
  if (static_cast<int>(gains_.size()) != users_ * users_)
    throw DimensionError("scalar channel needs K*K gains");
  for (const auto& z : gains_) check_finite(z);
  check_budgets(budgets_, users_);
}

ScalarChannel ScalarChannel::from_power_gains(const Eigen::MatrixXd& power_gains,
                                              std::vector<double> budgets) {
  if (power_gains.rows() != power_gains.cols())
    throw DimensionError("power gain matrix must be square");
  const int users = static_cast<int>(power_gains.rows());
  std::vector<Complex> gains(users * users);
  for (int l = 0; l < users; ++l)
    for (int k = 0; k < users; ++k) {
      if (power_gains(l, k) < 0.0) throw ParameterError("power gains must be nonnegative");
      gains[l * users + k] = std::sqrt(power_gains(l, k));
    }
  return {users, std::move(gains), std::move(budgets)};
}

ScalarChannel ScalarChannel::with_budgets(std::vector<double> budgets) const {
  return {users_, gains_, std::move(budgets)};
}

// ---- ParallelChannel ------------------------------------------------------

ParallelChannel::ParallelChannel(int users, int tones, std::vector<Complex> gains,
                                 std::vector<double> budgets)
    : users_(users), tones_(tones), gains_(std::move(gains)), budgets_(std::move(budgets)) {
  if (users_ < 1 || tones_ < 1) throw DimensionError("parallel channel needs K >= 1 and N >= 1");
  if (gains_.size() != static_cast<std::size_t>(tones_) * users_ * users_)
    throw DimensionError("parallel channel needs N*K*K gains");
  for (const auto& z : gains_) check_finite(z);
  check_budgets(budgets_, users_);
}

ParallelChannel ParallelChannel::from_power_gains(const std::vector<Eigen::MatrixXd>& power_gains,
                                                  std::vector<double> budgets) {
  if (power_gains.empty()) throw DimensionError("parallel channel needs N >= 1");
  const int users = static_cast<int>(power_gains.front().rows());
  const int tones = static_cast<int>(power_gains.size());
  std::vector<Complex> gains;
  gains.reserve(static_cast<std::size_t>(tones) * users * users);
  for (const auto& g : power_gains) {
    if (g.rows() != users || g.cols() != users)
      throw DimensionError("every tone needs a K x K power gain matrix");
    for (int l = 0; l < users; ++l)
      for (int k = 0; k < users; ++k) {
        if (g(l, k) < 0.0) throw ParameterError("power gains must be nonnegative");
        gains.emplace_back(std::sqrt(g(l, k)));
      }
  }
  return {users, tones, std::move(gains), std::move(budgets)};
}

ScalarChannel ParallelChannel::tone(int n) const {
  const auto first = gains_.begin() + static_cast<std::ptrdiff_t>(n) * users_ * users_;
  return {users_, std::vector<Complex>(first, first + users_ * users_), budgets_};
}

ParallelChannel ParallelChannel::with_budgets(std::vector<double> budgets) const {
  return {users_, tones_, gains_, std::move(budgets)};
}

// ---- MisoChannel ----------------------------------------------------------

MisoChannel::MisoChannel(int users, int tx_antennas, std::vector<Eigen::RowVectorXcd> gains,
                         std::vector<double> budgets)
    : users_(users),
      tx_antennas_(tx_antennas),
      gains_(std::move(gains)),
      budgets_(std::move(budgets)) {
  if (users_ < 1 || tx_antennas_ < 1) throw DimensionError("MISO channel needs K >= 1 and Nt >= 1");
  if (static_cast<int>(gains_.size()) != users_ * users_)
    throw DimensionError("MISO channel needs K*K row vectors");
  for (const auto& h : gains_) {
    if (h.size() != tx_antennas_) throw DimensionError("MISO row vectors must have length Nt");
    for (const auto& z : h) check_finite(z);
  }
  check_budgets(budgets_, users_);
}

MisoChannel MisoChannel::with_budgets(std::vector<double> budgets) const {
  return {users_, tx_antennas_, gains_, std::move(budgets)};
}

// ---- MimoChannel ----------------------------------------------------------

MimoChannel::MimoChannel(std::vector<AntennaPair> antennas, std::vector<Eigen::MatrixXcd> gains,
                         std::vector<double> budgets)
    : antennas_(std::move(antennas)), gains_(std::move(gains)), budgets_(std::move(budgets)) {
  const int k_users = users();
  if (k_users < 1) throw DimensionError("MIMO channel needs K >= 1");
  for (const auto& a : antennas_)
    if (a.tx < 1 || a.rx < 1) throw DimensionError("antenna counts must be >= 1");
  if (static_cast<int>(gains_.size()) != k_users * k_users)
    throw DimensionError("MIMO channel needs K*K matrices");
  for (int l = 0; l < k_users; ++l)
    for (int k = 0; k < k_users; ++k) {
      const auto& h = gains_[l * k_users + k];
      if (h.rows() != antennas_[k].rx || h.cols() != antennas_[l].tx)
        throw DimensionError("H_" + std::to_string(l) + std::to_string(k) +
                             " must be rx(k) x tx(l)");
      for (Eigen::Index i = 0; i < h.size(); ++i) check_finite(h.data()[i]);
    }
  check_budgets(budgets_, k_users);
}

MimoChannel MimoChannel::with_budgets(std::vector<double> budgets) const {
  return {antennas_, gains_, std::move(budgets)};
}

// ---- kinds and generation -------------------------------------------------

std::string to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::scalar: return "scalar";
    case ChannelKind::parallel: return "parallel";
    case ChannelKind::miso: return "miso";
    case ChannelKind::mimo: return "mimo";
  }
  return "unknown";
}

ChannelKind parse_channel_kind(const std::string& name) {
  if (name == "scalar") return ChannelKind::scalar;
  if (name == "parallel") return ChannelKind::parallel;
  if (name == "miso") return ChannelKind::miso;
  if (name == "mimo") return ChannelKind::mimo;
  throw ParameterError("unknown channel kind '" + name + "'");
}

ScalarChannel gen_scalar(int users, std::uint64_t seed) {
  if (users < 1) throw DimensionError("K must be >= 1");
  Rng rng(seed);
  std::vector<Complex> gains(users * users);
  for (auto& z : gains) z = rng.complex_gaussian();
  return {users, std::move(gains), unit_budgets(users)};
}

ParallelChannel gen_parallel(int users, int tones, std::uint64_t seed) {
  if (users < 1 || tones < 1) throw DimensionError("K and N must be >= 1");
  Rng rng(seed);
  std::vector<Complex> gains(static_cast<std::size_t>(tones) * users * users);
  for (auto& z : gains) z = rng.complex_gaussian();
  return {users, tones, std::move(gains), unit_budgets(users)};
}

MisoChannel gen_miso(int users, int tx_antennas, std::uint64_t seed) {
  if (users < 1 || tx_antennas < 1) throw DimensionError("K and Nt must be >= 1");
  Rng rng(seed);
  std::vector<Eigen::RowVectorXcd> gains(users * users, Eigen::RowVectorXcd(tx_antennas));
  for (auto& h : gains)
    for (Eigen::Index t = 0; t < h.size(); ++t) h(t) = rng.complex_gaussian();
  return {users, tx_antennas, std::move(gains), unit_budgets(users)};
}

MimoChannel gen_mimo(std::vector<AntennaPair> antennas, std::uint64_t seed) {
  const int users = static_cast<int>(antennas.size());
  if (users < 1) throw DimensionError("K must be >= 1");
  for (const auto& a : antennas)
    if (a.tx < 1 || a.rx < 1) throw DimensionError("antenna counts must be >= 1");
  Rng rng(seed);
  std::vector<Eigen::MatrixXcd> gains;
  gains.reserve(users * users);
  for (int l = 0; l < users; ++l)
    for (int k = 0; k < users; ++k) {
      Eigen::MatrixXcd h(antennas[k].rx, antennas[l].tx);
      for (Eigen::Index r = 0; r < h.rows(); ++r)
        for (Eigen::Index c = 0; c < h.cols(); ++c) h(r, c) = rng.complex_gaussian();
      gains.push_back(std::move(h));
    }
  return {std::move(antennas), std::move(gains), unit_budgets(users)};
}

AnyChannel gen_channel(ChannelKind kind, const ChannelDims& dims, std::uint64_t seed) {
  switch (kind) {
    case ChannelKind::scalar: return gen_scalar(dims.users, seed);
    case ChannelKind::parallel: return gen_parallel(dims.users, dims.tones, seed);
    case ChannelKind::miso: return gen_miso(dims.users, dims.tx_antennas, seed);
    case ChannelKind::mimo: {
      auto antennas = dims.antennas;
      if (antennas.empty()) {
        if (dims.users < 1) throw DimensionError("K must be >= 1");
        antennas.assign(dims.users, AntennaPair{dims.tx_antennas, dims.rx_antennas});
      } else if (static_cast<int>(antennas.size()) != dims.users) {
        throw DimensionError("antenna profile length must equal K");
      }
      return gen_mimo(std::move(antennas), seed);
    }
  }
  throw ParameterError("unknown channel kind");
}

std::vector<double> budgets_from_snr_db(int users, double snr_db) {
  return std::vector<double>(users, std::pow(10.0, snr_db / 10.0));
}

// ---- evaluators -----------------------------------------------------------

Eigen::VectorXd sinr_scalar(const ScalarChannel& ch, const PowerVector& p) {
  const int users = ch.users();
  if (p.size() != users) throw DimensionError("power vector length must equal K");
  Eigen::VectorXd sinr(users);
  for (int k = 0; k < users; ++k) {
    const double den = interference_plus_noise(
        users, k, [&](int l) { return ch.power_gain(l, k); }, [&](int l) { return p(l); });
    sinr(k) = ch.power_gain(k, k) * p(k) / den;
  }
  return sinr;
}

Eigen::VectorXd rate_scalar(const ScalarChannel& ch, const PowerVector& p) {
  return sinr_scalar(ch, p).unaryExpr([](double s) { return std::log2(1.0 + s); });
}

Eigen::MatrixXd sinr_parallel(const ParallelChannel& ch, const PowerMatrix& p) {
  const int users = ch.users();
  const int tones = ch.tones();
  if (p.rows() != users || p.cols() != tones)
    throw DimensionError("power matrix must be K x N");
  Eigen::MatrixXd sinr(users, tones);
  for (int n = 0; n < tones; ++n)
    for (int k = 0; k < users; ++k) {
      const double den = interference_plus_noise(
          users, k, [&](int l) { return ch.power_gain(n, l, k); },
          [&](int l) { return p(l, n); });
      sinr(k, n) = ch.power_gain(n, k, k) * p(k, n) / den;
    }
  return sinr;
}

Eigen::VectorXd rate_parallel(const ParallelChannel& ch, const PowerMatrix& p) {
  const Eigen::MatrixXd sinr = sinr_parallel(ch, p);
  Eigen::VectorXd rates = Eigen::VectorXd::Zero(ch.users());
  for (int k = 0; k < ch.users(); ++k)
    for (int n = 0; n < ch.tones(); ++n) rates(k) += std::log2(1.0 + sinr(k, n));
  return rates;
}

Eigen::VectorXd sinr_miso(const MisoChannel& ch, const BeamVectors& v) {
  const int users = ch.users();
  if (static_cast<int>(v.size()) != users) throw DimensionError("need one beamformer per user");
  for (const auto& vk : v)
    if (vk.size() != ch.tx_antennas()) throw DimensionError("beamformer length must equal Nt");
  Eigen::VectorXd sinr(users);
  for (int k = 0; k < users; ++k) {
    double den = 1.0;
    for (int l = 0; l < users; ++l)
      if (l != k) den += std::norm((ch.gain(l, k) * v[l]).value());
    sinr(k) = std::norm((ch.gain(k, k) * v[k]).value()) / den;
  }
  return sinr;
}

Eigen::VectorXd rate_miso(const MisoChannel& ch, const BeamVectors& v) {
  return sinr_miso(ch, v).unaryExpr([](double s) { return std::log2(1.0 + s); });
}

void check_covariances(const MimoChannel& ch, const CovarianceSet& q) {
  if (static_cast<int>(q.size()) != ch.users()) throw DimensionError("need one covariance per user");
  for (int k = 0; k < ch.users(); ++k) {
    const auto& qk = q[k];
    const int m = ch.antennas(k).tx;
    if (qk.rows() != m || qk.cols() != m)
      throw DimensionError("Q_" + std::to_string(k) + " must be tx(k) x tx(k)");
    if ((qk - qk.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
      throw DomainError("Q_" + std::to_string(k) + " is not Hermitian", k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(qk, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10)
      throw DomainError("Q_" + std::to_string(k) + " is not positive semidefinite", k);
  }
}

Eigen::VectorXd rate_mimo(const MimoChannel& ch, const CovarianceSet& q) {
  check_covariances(ch, q);
  const int users = ch.users();
  Eigen::VectorXd rates(users);
  for (int k = 0; k < users; ++k) {
    const int nr = ch.antennas(k).rx;
    Eigen::MatrixXcd interference = Eigen::MatrixXcd::Identity(nr, nr);
    for (int l = 0; l < users; ++l) {
      if (l == k) continue;
      const auto& h = ch.gain(l, k);
      interference.noalias() += h * q[l] * h.adjoint();
    }
    const auto& hkk = ch.gain(k, k);
    Eigen::MatrixXcd total = interference + hkk * q[k] * hkk.adjoint();
    // Symmetrize away rounding before factoring.
    interference = 0.5 * (interference + interference.adjoint()).eval();
    total = 0.5 * (total + total.adjoint()).eval();
    rates(k) = std::max(0.0, log2_det_hpd(total) - log2_det_hpd(interference));
  }
  return rates;
}

std::vector<Eigen::VectorXd> sinr_mimo_stream(const MimoChannel& ch,
                                              const std::vector<Eigen::MatrixXcd>& u,
                                              const std::vector<Eigen::MatrixXcd>& v) {
  const int users = ch.users();
  if (static_cast<int>(u.size()) != users || static_cast<int>(v.size()) != users)
    throw DimensionError("need one receive and one transmit filter per user");
  for (int k = 0; k < users; ++k) {
    if (u[k].rows() != ch.antennas(k).rx || v[k].rows() != ch.antennas(k).tx ||
        u[k].cols() != v[k].cols())
      throw DimensionError("filter shapes do not match antenna profile of user " +
                           std::to_string(k));
  }
  std::vector<Eigen::VectorXd> out(users);
  for (int k = 0; k < users; ++k) {
    const Eigen::Index streams = u[k].cols();
    out[k].resize(streams);
    for (Eigen::Index s = 0; s < streams; ++s) {
      const Eigen::VectorXcd us = u[k].col(s);
      double den = us.squaredNorm();
      double num = 0.0;
      for (int l = 0; l < users; ++l) {
        const Eigen::RowVectorXcd eff = us.adjoint() * ch.gain(l, k) * v[l];
        for (Eigen::Index t = 0; t < eff.size(); ++t) {
          if (l == k && t == s)
            num = std::norm(eff(t));
          else
            den += std::norm(eff(t));
        }
      }
      out[k](s) = num / den;
    }
  }
  return out;
}

CovarianceSet covariances_from_beamformers(const std::vector<Eigen::MatrixXcd>& v) {
  CovarianceSet q;
  q.reserve(v.size());
  for (const auto& vk : v) q.push_back(vk * vk.adjoint());
  return q;
}

CovarianceSet covariances_from_powers(const PowerMatrix& p) {
  CovarianceSet q;
  q.reserve(p.rows());
  for (Eigen::Index k = 0; k < p.rows(); ++k)
    q.push_back(p.row(k).transpose().cast<Complex>().asDiagonal());
  return q;
}

MimoChannel embed_parallel_as_mimo(const ParallelChannel& ch) {
  const int users = ch.users();
  const int tones = ch.tones();
  std::vector<Eigen::MatrixXcd> gains;
  gains.reserve(users * users);
  for (int l = 0; l < users; ++l)
    for (int k = 0; k < users; ++k) {
      Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(tones, tones);
      for (int n = 0; n < tones; ++n) h(n, n) = ch.gain(n, l, k);
      gains.push_back(std::move(h));
    }
  return {std::vector<AntennaPair>(users, AntennaPair{tones, tones}), std::move(gains),
          ch.budgets()};
}

double weighted_sum(std::span<const double> weights, const Eigen::VectorXd& rates) {
  if (weights.empty()) return rates.sum();
  if (static_cast<Eigen::Index>(weights.size()) != rates.size())
    throw DimensionError("weights and rates differ in length");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < rates.size(); ++k) acc += weights[k] * rates(k);
  return acc;
}

}  // namespace icran
