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

#include "icran/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "icran/errors.hpp"
#include "icran/waterfilling.hpp"
#include "icran/wsrm.hpp"

namespace icran {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

void check_keys(const std::string& alg, const json& params, const std::vector<std::string>& allowed) {
  if (!params.is_object()) throw ConfigError("params of " + alg + " must be an object");
  for (const auto& [key, value] : params.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown parameter '" + key + "' for " + alg + " (valid: " + join(allowed) + ")");
}

template <class T>
T param(const json& params, const char* key, T fallback) {
  if (!params.contains(key)) return fallback;
  try {
    return params.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("parameter '") + key + "': " + e.what());
  }
}

WmmseOptions wmmse_options(const AlgorithmSpec& a) {
  check_keys(a.name, a.params, {"epsilon", "max_iter"});
  WmmseOptions o;
  o.epsilon = param(a.params, "epsilon", o.epsilon);
  o.max_iter = param(a.params, "max_iter", o.max_iter);
  return o;
}

MdpOptions mdp_options(const AlgorithmSpec& a) {
  check_keys(a.name, a.params, {"tol", "max_iter"});
  MdpOptions o;
  o.tol = param(a.params, "tol", o.tol);
  o.max_iter = param(a.params, "max_iter", o.max_iter);
  return o;
}

ScaleOptions scale_options(const AlgorithmSpec& a) {
  check_keys(a.name, a.params, {"tol", "max_iter", "grad_steps", "step_size"});
  ScaleOptions o;
  o.tol = param(a.params, "tol", o.tol);
  o.max_iter = param(a.params, "max_iter", o.max_iter);
  o.grad_steps = param(a.params, "grad_steps", o.grad_steps);
  o.step_size = param(a.params, "step_size", o.step_size);
  return o;
}

IwfaOptions iwfa_options(const AlgorithmSpec& a) {
  check_keys(a.name, a.params, {"schedule", "damping", "tol", "max_iter"});
  IwfaOptions o;
  std::string sched = param<std::string>(a.params, "schedule", "sequential");
  if (sched == "sequential") o.schedule = Schedule::sequential;
  else if (sched == "simultaneous") o.schedule = Schedule::simultaneous;
  else throw ConfigError("schedule must be sequential or simultaneous, got '" + sched + "'");
  o.damping = param(a.params, "damping", o.damping);
  o.tol = param(a.params, "tol", o.tol);
  o.max_iter = param(a.params, "max_iter", o.max_iter);
  return o;
}

CcaOptions cca_options(const AlgorithmSpec& a, UtilitySpec& spec) {
  check_keys(a.name, a.params, {"utility", "tol", "max_iter", "armijo_c", "shrink"});
  try {
    spec = UtilitySpec::parse(param<std::string>(a.params, "utility", "sum"));
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (!spec.smooth()) throw ConfigError("cca needs a differentiable utility");
  CcaOptions o;
  o.tol = param(a.params, "tol", o.tol);
  o.max_iter = param(a.params, "max_iter", o.max_iter);
  o.armijo_c = param(a.params, "armijo_c", o.armijo_c);
  o.shrink = param(a.params, "shrink", o.shrink);
  return o;
}

std::vector<int> mimo_streams(const AlgorithmSpec& a, const MimoChannel& ch) {
  check_keys(a.name, a.params, {"epsilon", "max_iter", "streams"});
  const int K = ch.users();
  std::vector<int> d(K);
  for (int k = 0; k < K; ++k) d[k] = std::min(ch.antennas(k).tx, ch.antennas(k).rx);
  if (a.params.contains("streams")) {
    const json& s = a.params.at("streams");
    if (s.is_number_integer()) {
      d.assign(K, s.get<int>());
    } else if (s.is_array() && static_cast<int>(s.size()) == K) {
      for (int k = 0; k < K; ++k) d[k] = s[k].get<int>();
    } else {
      throw ConfigError("streams must be an integer or one integer per user");
    }
  }
  return d;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json cmatrix_json(const Eigen::MatrixXcd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

Eigen::MatrixXcd cmatrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = {j[r][c][0].get<double>(), j[r][c][1].get<double>()};
  return m;
}

template <class Trace>
void fill_row(ResultRow& row, const Trace& tr) {
  row.sum_rate = tr.final_rates.sum();
  row.iterations = tr.iterations;
  row.converged = tr.converged;
}

ResultRow run_cell(const ExperimentConfig& cfg, const AlgorithmSpec& alg, const AnyChannel& base,
                   double snr) {
  ResultRow row;
  row.algorithm = alg.name;
  row.snr_db = snr;
  const auto start = std::chrono::steady_clock::now();
  std::visit(
      [&](const auto& raw) {
        using T = std::decay_t<decltype(raw)>;
        const auto ch = raw.with_budgets(budgets_from_snr_db(raw.users(), snr));
        if constexpr (std::is_same_v<T, ParallelChannel>) {
          SolverTrace<PowerMatrix> tr;
          if (alg.name == "wmmse") tr = wmmse_parallel(ch, {}, wmmse_options(alg));
          else if (alg.name == "mdp") tr = mdp_solve(ch, {}, mdp_options(alg));
          else if (alg.name == "scale") tr = scale_solve(ch, {}, scale_options(alg));
          else tr = iwfa(ch, iwfa_options(alg));
          fill_row(row, tr);
          row.final_iterate = matrix_json(tr.final_iterate);
        } else if constexpr (std::is_same_v<T, MisoChannel>) {
          UtilitySpec spec;
          CcaOptions o = cca_options(alg, spec);
          auto tr = cca_miso(ch, spec, o);
          fill_row(row, tr);
          row.final_iterate = json::array();
          for (const auto& v : tr.final_iterate) row.final_iterate.push_back(cmatrix_json(v));
        } else if constexpr (std::is_same_v<T, MimoChannel>) {
          std::vector<int> d = mimo_streams(alg, ch);
          WmmseOptions o;
          AlgorithmSpec trimmed = alg;
          trimmed.params.erase("streams");
          o = wmmse_options(trimmed);
          auto tr = wmmse_mimo(ch, d, {}, o);
          fill_row(row, tr);
          row.final_iterate = json::array();
          for (const auto& v : tr.final_iterate.V) row.final_iterate.push_back(cmatrix_json(v));
        } else {
          throw ConfigError("scalar scenarios have no solver");
        }
      },
      base);
  row.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  (void)cfg;
  return row;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double pairwise(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n == 1) return v[0];
  std::size_t h = n / 2;
  return pairwise(v, h) + pairwise(v + h, n - h);
}

}  // namespace

std::vector<std::string> valid_algorithms(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::parallel: return {"wmmse", "mdp", "scale", "iwfa"};
    case ChannelKind::miso: return {"cca"};
    case ChannelKind::mimo: return {"wmmse_mimo"};
    case ChannelKind::scalar: break;
  }
  return {};
}

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> top{"version", "scenario", "snr_db", "algorithms",
                                           "realizations", "base_seed", "output", "format"};
    for (const auto& [key, value] : doc.items())
      if (!top.count(key)) throw ConfigError("unknown config key '" + key + "'");
    ExperimentConfig cfg;
    if (!doc.contains("version")) throw ConfigError("config needs a \"version\" field");
    cfg.version = doc.at("version").get<int>();
    const json& sc = doc.at("scenario");
    try {
      cfg.kind = parse_channel_kind(sc.at("kind").get<std::string>());
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
    cfg.dims.users = sc.at("users").get<int>();
    cfg.dims.tones = sc.value("tones", 1);
    cfg.dims.tx_antennas = sc.value("tx_antennas", 1);
    cfg.dims.rx_antennas = sc.value("rx_antennas", 1);
    if (sc.contains("antennas"))
      for (const auto& a : sc.at("antennas")) cfg.dims.antennas.push_back({a.at(0).get<int>(), a.at(1).get<int>()});
    cfg.snr_db = doc.at("snr_db").get<std::vector<double>>();
    for (const auto& a : doc.at("algorithms")) {
      AlgorithmSpec spec;
      spec.name = a.at("name").get<std::string>();
      if (a.contains("params")) spec.params = a.at("params");
      cfg.algorithms.push_back(std::move(spec));
    }
    cfg.realizations = doc.value("realizations", 1);
    cfg.base_seed = doc.value("base_seed", std::uint64_t{0});
    cfg.output = doc.value("output", std::string{});
    cfg.format = doc.value("format", std::string{"csv"});
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
}

json ExperimentConfig::to_json() const {
  json sc = {{"kind", icran::to_string(kind)}, {"users", dims.users}};
  if (kind == ChannelKind::parallel) sc["tones"] = dims.tones;
  if (kind == ChannelKind::miso || kind == ChannelKind::mimo) sc["tx_antennas"] = dims.tx_antennas;
  if (kind == ChannelKind::mimo) {
    sc["rx_antennas"] = dims.rx_antennas;
    if (!dims.antennas.empty()) {
      sc["antennas"] = json::array();
      for (const auto& a : dims.antennas) sc["antennas"].push_back({a.tx, a.rx});
    }
  }
  json algs = json::array();
  for (const auto& a : algorithms) algs.push_back({{"name", a.name}, {"params", a.params}});
  json out = {{"version", version}, {"scenario", sc},           {"snr_db", snr_db},
              {"algorithms", algs}, {"realizations", realizations}, {"base_seed", base_seed},
              {"format", format}};
  if (!output.empty()) out["output"] = output;
  return out;
}

void ExperimentConfig::validate() const {
  if (version != 1) throw ConfigError("unsupported config version " + std::to_string(version));
  if (kind == ChannelKind::scalar)
    throw ConfigError("scalar scenarios have no solver; use a parallel scenario with tones = 1");
  if (dims.users < 1) throw ConfigError("scenario needs users >= 1");
  if (dims.tones < 1 || dims.tx_antennas < 1 || dims.rx_antennas < 1)
    throw ConfigError("tones and antenna counts must be >= 1");
  if (!dims.antennas.empty() && static_cast<int>(dims.antennas.size()) != dims.users)
    throw ConfigError("antennas needs one [M, N] pair per user");
  if (snr_db.empty()) throw ConfigError("snr_db must list at least one value");
  if (algorithms.empty()) throw ConfigError("algorithms must list at least one entry");
  if (realizations < 1) throw ConfigError("realizations must be >= 1");
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
  const auto valid = valid_algorithms(kind);
  for (const auto& a : algorithms) {
    if (std::find(valid.begin(), valid.end(), a.name) == valid.end())
      throw ConfigError("unknown algorithm '" + a.name + "' for " + icran::to_string(kind) +
                        " scenarios (valid: " + join(valid) + ")");
    if (a.name == "wmmse") wmmse_options(a);
    else if (a.name == "mdp") mdp_options(a);
    else if (a.name == "scale") scale_options(a);
    else if (a.name == "iwfa") iwfa_options(a);
    else if (a.name == "cca") {
      UtilitySpec spec;
      cca_options(a, spec);
    } else if (a.name == "wmmse_mimo") {
      check_keys(a.name, a.params, {"epsilon", "max_iter", "streams"});
    }
  }
}

ResultTable run_experiment(const ExperimentConfig& cfg, Exec exec) {
  cfg.validate();
  const int A = static_cast<int>(cfg.algorithms.size());
  const int S = static_cast<int>(cfg.snr_db.size());
  const int R = cfg.realizations;
  std::vector<AnyChannel> channels;
  channels.reserve(R);
  for (int r = 0; r < R; ++r) channels.push_back(gen_channel(cfg.kind, cfg.dims, cfg.base_seed + r));

  const long long cells = static_cast<long long>(A) * S * R;
  ResultTable table;
  table.rows.resize(cells);
  std::vector<std::exception_ptr> errors(cells);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel) num_threads(worker_count())
  for (long long i = 0; i < cells; ++i) {
    const int r = static_cast<int>(i % R);
    const int s = static_cast<int>((i / R) % S);
    const int a = static_cast<int>(i / (static_cast<long long>(R) * S));
    try {
      ResultRow row = run_cell(cfg, cfg.algorithms[a], channels[r], cfg.snr_db[s]);
      row.realization = r;
      row.seed = cfg.base_seed + r;
      table.rows[i] = std::move(row);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return table;
}

double ordered_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return pairwise(values.data(), values.size());
}

std::vector<SummaryRow> summarize(const ResultTable& table) {
  std::vector<SummaryRow> out;
  std::map<std::pair<std::string, double>, std::size_t> index;
  std::vector<std::vector<double>> rates, times;
  for (const auto& row : table.rows) {
    auto key = std::make_pair(row.algorithm, row.snr_db);
    auto [it, fresh] = index.emplace(key, out.size());
    if (fresh) {
      out.push_back({row.algorithm, row.snr_db, 0.0, 0.0, 0});
      rates.emplace_back();
      times.emplace_back();
    }
    rates[it->second].push_back(row.sum_rate);
    times[it->second].push_back(row.wall_time_ms);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].count = static_cast<int>(rates[i].size());
    out[i].mean_sum_rate = ordered_sum(rates[i]) / out[i].count;
    out[i].mean_wall_time_ms = ordered_sum(times[i]) / out[i].count;
  }
  return out;
}

void write_csv(std::ostream& os, const ResultTable& table) {
  os << "algorithm,snr_db,realization,seed,sum_rate,iterations,wall_time_ms,converged\n";
  for (const auto& r : table.rows)
    os << r.algorithm << ',' << fmt(r.snr_db) << ',' << r.realization << ',' << r.seed << ','
       << fmt(r.sum_rate) << ',' << r.iterations << ',' << fmt(r.wall_time_ms) << ','
       << (r.converged ? "true" : "false") << '\n';
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& summary) {
  os << "algorithm,snr_db,mean_sum_rate,mean_wall_time_ms,count\n";
  for (const auto& s : summary)
    os << s.algorithm << ',' << fmt(s.snr_db) << ',' << fmt(s.mean_sum_rate) << ','
       << fmt(s.mean_wall_time_ms) << ',' << s.count << '\n';
}

json to_json(const ResultTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"algorithm", r.algorithm},
                    {"snr_db", r.snr_db},
                    {"realization", r.realization},
                    {"seed", r.seed},
                    {"sum_rate", r.sum_rate},
                    {"iterations", r.iterations},
                    {"wall_time_ms", r.wall_time_ms},
                    {"converged", r.converged},
                    {"final_iterate", r.final_iterate}});
  json summary = json::array();
  for (const auto& s : summarize(table))
    summary.push_back({{"algorithm", s.algorithm},
                       {"snr_db", s.snr_db},
                       {"mean_sum_rate", s.mean_sum_rate},
                       {"mean_wall_time_ms", s.mean_wall_time_ms},
                       {"count", s.count}});
  return {{"version", 1}, {"rows", rows}, {"summary", summary}};
}

double rederive_sum_rate(const ExperimentConfig& cfg, const ResultRow& row) {
  AnyChannel base = gen_channel(cfg.kind, cfg.dims, row.seed);
  return std::visit(
      [&](const auto& raw) -> double {
        using T = std::decay_t<decltype(raw)>;
        const auto ch = raw.with_budgets(budgets_from_snr_db(raw.users(), row.snr_db));
        if constexpr (std::is_same_v<T, ParallelChannel>) {
          return rate_parallel(ch, matrix_from_json(row.final_iterate)).sum();
        } else if constexpr (std::is_same_v<T, MisoChannel>) {
          BeamVectors v;
          for (const auto& j : row.final_iterate) v.push_back(cmatrix_from_json(j).col(0));
          return rate_miso(ch, v).sum();
        } else if constexpr (std::is_same_v<T, MimoChannel>) {
          std::vector<Eigen::MatrixXcd> v;
          for (const auto& j : row.final_iterate) v.push_back(cmatrix_from_json(j));
          return rate_mimo(ch, covariances_from_beamformers(v)).sum();
        } else {
          throw ConfigError("scalar scenarios have no solver output");
        }
      },
      base);
}

}  // namespace icran
