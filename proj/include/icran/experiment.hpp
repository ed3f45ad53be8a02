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
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "icran/channels.hpp"
#include "icran/parallel.hpp"

namespace icran {

struct AlgorithmSpec {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

// Config document, version 1:
//   {"version": 1,
//    "scenario": {"kind": "parallel", "users": 10, "tones": 32},
//    "snr_db": [0, 5, 10],
//    "algorithms": [{"name": "wmmse", "params": {"epsilon": 0.01}}, ...],
//    "realizations": 20, "base_seed": 1,
//    "output": "results.csv", "format": "csv"}
// miso scenarios take "tx_antennas"; mimo scenarios take "tx_antennas" and
// "rx_antennas" or a per-user "antennas": [[M, N], ...].
struct ExperimentConfig {
  int version = 1;
  ChannelKind kind = ChannelKind::parallel;
  ChannelDims dims;
  std::vector<double> snr_db;
  std::vector<AlgorithmSpec> algorithms;
  int realizations = 1;
  std::uint64_t base_seed = 0;
  std::string output;
  std::string format = "csv";

  static ExperimentConfig from_json(const nlohmann::json& doc);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json to_json() const;
  // Throws ConfigError; unknown algorithm names list the valid ones.
  void validate() const;
};

std::vector<std::string> valid_algorithms(ChannelKind kind);

struct ResultRow {
  std::string algorithm;
  double snr_db = 0.0;
  int realization = 0;
  std::uint64_t seed = 0;
  double sum_rate = 0.0;
  int iterations = 0;
  double wall_time_ms = 0.0;
  bool converged = false;
  nlohmann::json final_iterate;
};

// Rows are ordered algorithm, then SNR, then realization, as listed in the
// config.
struct ResultTable {
  std::vector<ResultRow> rows;
};

/// Realization r draws its channel from seed base_seed + r; the same channel
/// is reused across SNR points and algorithms. With Exec::parallel the
/// (algorithm, SNR, realization) cells run concurrently; numeric columns do
/// not depend on the schedule.
ResultTable run_experiment(const ExperimentConfig& cfg, Exec exec = Exec::serial);

/// Sum of values sorted ascending, added pairwise. Independent of input order.
double ordered_sum(std::vector<double> values);

struct SummaryRow {
  std::string algorithm;
  double snr_db = 0.0;
  double mean_sum_rate = 0.0;
  double mean_wall_time_ms = 0.0;
  int count = 0;
};

std::vector<SummaryRow> summarize(const ResultTable& table);

void write_csv(std::ostream& os, const ResultTable& table);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& summary);
nlohmann::json to_json(const ResultTable& table);

/// Sum rate recomputed from the row's serialized final iterate on a freshly
/// generated channel.
double rederive_sum_rate(const ExperimentConfig& cfg, const ResultRow& row);

}  // namespace icran
