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

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "icran/alignment.hpp"
#include "icran/errors.hpp"
#include "icran/experiment.hpp"
#include "icran/power_control.hpp"
#include "icran/rate_region.hpp"
#include "icran/waterfilling.hpp"

using nlohmann::json;
using namespace icran;

namespace {

struct Global {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  bool quiet = false;
};

// A flat table that renders either as CSV or as a JSON array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  json meta = json::object();
};

std::string cell(const json& v) {
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void render(std::ostream& os, const Table& t, const std::string& format) {
  if (format == "json") {
    json rows = json::array();
    for (const auto& r : t.rows) {
      json o = json::object();
      for (std::size_t c = 0; c < t.columns.size(); ++c) o[t.columns[c]] = r[c];
      rows.push_back(std::move(o));
    }
    json doc = t.meta;
    doc["rows"] = std::move(rows);
    os << doc.dump(2) << '\n';
    return;
  }
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << cell(r[c]);
    os << '\n';
  }
}

template <class Fn>
void emit(const Global& g, Fn&& write) {
  if (g.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw ConfigError("cannot write '" + g.out + "'");
  write(f);
}

void note(const Global& g, const std::string& msg) {
  if (!g.quiet) std::cerr << msg << '\n';
}

ScalarChannel two_user(const Global& g, double alpha, double snr_db) {
  const auto budgets = budgets_from_snr_db(2, snr_db);
  if (alpha < 0) return gen_scalar(2, g.seed).with_budgets(budgets);
  Eigen::MatrixXd gains(2, 2);
  gains << 1.0, alpha, alpha, 1.0;
  return ScalarChannel::from_power_gains(gains, budgets);
}

void run_region(const Global& g, double alpha, double snr_db, int grid) {
  const ScalarChannel ch = two_user(g, alpha, snr_db);
  const RegionSample frontier = frontier_2user(ch, grid);
  Table t;
  t.columns = {"curve", "r1", "r2", "label"};
  for (std::size_t i = 0; i < frontier.points.size(); ++i)
    t.rows.push_back({"frontier", frontier.points[i].r1, frontier.points[i].r2, frontier.labels[i]});
  for (const auto& p : frontier.hull) t.rows.push_back({"hull", p.r1, p.r2, ""});
  const NeEfficiency ne = ne_efficiency_2user(ch, grid);
  const ConvexityReport cvx = convexity_2user(ch);
  t.meta = {{"ne_sum", ne.ne_sum}, {"best_timeshare_sum", ne.best_timeshare_sum}, {"convex", cvx.convex}};
  note(g, "ne sum " + cell(ne.ne_sum) + ", best time-share sum " + cell(ne.best_timeshare_sum) +
              ", frontier " + (cvx.convex ? "convex" : "nonconvex"));
  emit(g, [&](std::ostream& os) { render(os, t, g.format); });
}

void run_bench_config(const Global& g, ExperimentConfig cfg) {
  if (!g.out.empty()) cfg.output = g.out;
  const ResultTable table = run_experiment(cfg, Exec::parallel);
  const auto summary = summarize(table);
  for (const auto& s : summary)
    note(g, s.algorithm + " snr " + cell(s.snr_db) + " dB: mean sum rate " + cell(s.mean_sum_rate));
  auto write = [&](std::ostream& os) {
    if (cfg.format == "json") os << to_json(table).dump(2) << '\n';
    else write_csv(os, table);
  };
  if (cfg.output.empty()) {
    write(std::cout);
  } else {
    std::ofstream f(cfg.output);
    if (!f) throw ConfigError("cannot write '" + cfg.output + "'");
    write(f);
  }
}

void run_iwfa(const Global& g, int users, int tones, double snr_db, const std::string& schedule,
              double damping, double rate_target, int max_iter) {
  const ParallelChannel ch = gen_parallel(users, tones, g.seed).with_budgets(budgets_from_snr_db(users, snr_db));
  const Schedule sched = schedule == "simultaneous" ? Schedule::simultaneous : Schedule::sequential;
  const Certificate sim = cert_simultaneous(ch);
  const Certificate seq = cert_sequential(ch);
  SolverTrace<PowerMatrix> tr;
  if (rate_target > 0) {
    FmIwfaOptions o;
    o.schedule = sched;
    o.max_iter = max_iter;
    tr = fm_iwfa(ch, std::vector<double>(users, rate_target), o);
  } else {
    IwfaOptions o;
    o.schedule = sched;
    o.damping = damping;
    o.max_iter = max_iter;
    o.exec = Exec::parallel;
    tr = iwfa(ch, o);
  }
  Table t;
  t.columns = {"iteration", "residual", "sum_rate"};
  for (std::size_t i = 0; i < tr.residual_history.size(); ++i)
    t.rows.push_back({static_cast<int>(i), tr.residual_history[i],
                      i < tr.objective_history.size() ? json(tr.objective_history[i]) : json(nullptr)});
  t.meta = {{"cert_simultaneous", {{"holds", sim.holds}, {"rho", sim.rho}}},
            {"cert_sequential", {{"holds", seq.holds}, {"rho", seq.rho}}},
            {"cert_symmetric_crosstalk", cert_symmetric_crosstalk(ch)},
            {"converged", tr.converged},
            {"termination", to_string(tr.termination)}};
  note(g, "rho simultaneous " + cell(sim.rho) + ", rho sequential " + cell(seq.rho) + ", " +
              to_string(tr.termination) + " after " + std::to_string(tr.iterations) + " iterations");
  emit(g, [&](std::ostream& os) { render(os, t, g.format); });
}

void run_power(const Global& g, int users, double snr_db, double target_db, double beta, int steps) {
  const ScalarChannel ch = gen_scalar(users, g.seed).with_budgets(budgets_from_snr_db(users, snr_db));
  const std::vector<double> targets(users, std::pow(10.0, target_db / 10.0));
  const FeasibilityReport feas = minpower_feasible(ch, targets);
  const double rho_z = spectral_radius(gain_ratio_matrix(ch));
  note(g, "rho(Z) " + cell(rho_z) + ", rho(target gain) " + cell(feas.rho));
  if (!feas.feasible) throw FeasibilityError("SINR targets are infeasible", feas.rho);
  const PowerVector closed = minpower_closed_form(ch, targets);
  const auto yates = yates_fixed_point(ch, targets, PowerVector::Zero(users));
  Table t;
  t.columns = {"user", "closed_form", "yates", "apc"};
  PowerVector apc = Eigen::Map<const Eigen::VectorXd>(ch.budgets().data(), users);
  json meta = {{"rho_z", rho_z}, {"rho_targets", feas.rho}, {"yates_iterations", yates.iterations}};
  if (users >= 2 && rho_z > 1.0 + 1e-12) {
    const double gamma = maxmin_sinr_optimum(ch);
    for (int s = 0; s < steps; ++s) apc = apc_step(ch, apc, gamma, beta);
    meta["gamma_star"] = gamma;
  }
  for (int k = 0; k < users; ++k) t.rows.push_back({k, closed[k], yates.final_iterate[k], apc[k]});
  t.meta = meta;
  emit(g, [&](std::ostream& os) { render(os, t, g.format); });
}

DofProfile profile(int users, int m, int n, int d) {
  DofProfile p;
  p.d.assign(users, d);
  p.antennas.assign(users, AntennaPair{m, n});
  p.validate();
  return p;
}

void run_ia_check(const Global& g, int users, int m, int n, int d) {
  const DofProfile p = profile(users, m, n, d);
  const FeasibilityVerdict v = feasibility_necessary(p, Exec::parallel);
  Table t;
  t.columns = {"condition", "holds"};
  t.rows = {{"i1", v.i1}, {"i2", v.i2}, {"counting", v.counting}, {"feasible", v.feasible()}};
  if (v.violating_subset) t.meta["violating_subset"] = *v.violating_subset;
  t.meta["symmetric_feasible"] = m == n ? json(symmetric_feasible(m, d, users)) : json(nullptr);
  note(g, std::string("necessary conditions ") + (v.feasible() ? "hold" : "fail"));
  emit(g, [&](std::ostream& os) { render(os, t, g.format); });
}

void run_ia_solve(const Global& g, int users, int m, int n, int d, int max_iter, double tol) {
  const DofProfile p = profile(users, m, n, d);
  const MimoChannel ch = gen_mimo(p.antennas, g.seed);
  IaOptions o;
  o.max_iter = max_iter;
  o.tol = tol;
  o.seed = g.seed + 1;
  const AlignmentResult r = ia_altmin(ch, p.d, o);
  Table t;
  t.columns = {"step", "leakage"};
  for (std::size_t i = 0; i < r.leakage_history.size(); ++i)
    t.rows.push_back({static_cast<int>(i), r.leakage_history[i]});
  t.meta = {{"converged", r.converged}, {"iterations", r.iterations}, {"rank_ok", r.rank_ok}};
  note(g, "leakage " + cell(r.leakage_history.back()) + " after " + std::to_string(r.iterations) +
              " iterations, rank " + (r.rank_ok ? "ok" : "deficient"));
  emit(g, [&](std::ostream& os) { render(os, t, g.format); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interference channel resource allocation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Seed for random channels")->capture_default_str();
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress progress on stderr");

  double alpha = -1.0, snr = 0.0;
  int grid = 512;
  auto* region = app.add_subcommand("region", "Two-user rate region frontier and time-sharing hull");
  region->add_option("--alpha", alpha, "Symmetric cross gain with unit direct gains (default random)");
  region->add_option("--snr", snr, "SNR in dB")->capture_default_str();
  region->add_option("--grid", grid, "Frontier samples")->capture_default_str()->check(CLI::PositiveNumber);

  int users = 10, tones = 32, realizations = 20;
  std::vector<double> snrs{0, 5, 10, 15, 20, 25, 30};
  std::vector<std::string> algs{"wmmse", "mdp", "scale"};
  auto* wsrm = app.add_subcommand("wsrm", "Sum-rate solver comparison on parallel channels");
  wsrm->add_option("--users", users)->capture_default_str()->check(CLI::PositiveNumber);
  wsrm->add_option("--tones", tones)->capture_default_str()->check(CLI::PositiveNumber);
  wsrm->add_option("--snr", snrs, "SNR grid in dB")->capture_default_str();
  wsrm->add_option("--realizations", realizations)->capture_default_str()->check(CLI::PositiveNumber);
  wsrm->add_option("--algorithms", algs)->capture_default_str();

  std::string schedule = "sequential";
  double damping = 0.0, rate_target = 0.0;
  int max_iter = 1000;
  auto* iw = app.add_subcommand("iwfa", "Iterative water-filling game with convergence certificates");
  iw->add_option("--users", users)->capture_default_str()->check(CLI::PositiveNumber);
  iw->add_option("--tones", tones)->capture_default_str()->check(CLI::PositiveNumber);
  iw->add_option("--snr", snr, "SNR in dB")->capture_default_str();
  iw->add_option("--schedule", schedule)->check(CLI::IsMember({"sequential", "simultaneous"}))->capture_default_str();
  iw->add_option("--damping", damping)->check(CLI::Range(0.0, 0.999999))->capture_default_str();
  iw->add_option("--rate-target", rate_target, "Per-user rate target; runs the fixed-margin game when > 0");
  iw->add_option("--max-iter", max_iter)->capture_default_str();

  double target_db = 0.0, beta = 0.1;
  int steps = 100;
  auto* power = app.add_subcommand("power", "Scalar power control suite");
  power->add_option("--users", users)->capture_default_str()->check(CLI::PositiveNumber);
  power->add_option("--snr", snr, "SNR in dB")->capture_default_str();
  power->add_option("--target", target_db, "Common SINR target in dB")->capture_default_str();
  power->add_option("--beta", beta, "APC step size")->capture_default_str();
  power->add_option("--steps", steps, "APC iterations")->capture_default_str();

  int m = 2, n = 2, d = 1;
  double tol = 1e-10;
  auto* ia = app.add_subcommand("ia", "Interference alignment");
  ia->require_subcommand(1);
  ia->fallthrough();
  auto* ia_check = ia->add_subcommand("check", "Necessary feasibility conditions");
  auto* ia_solve = ia->add_subcommand("solve", "Alternating leakage minimization");
  for (auto* sub : {ia_check, ia_solve}) {
    sub->add_option("--users", users)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("-M,--tx", m, "Transmit antennas")->capture_default_str();
    sub->add_option("-N,--rx", n, "Receive antennas")->capture_default_str();
    sub->add_option("-d,--streams", d, "Streams per user")->capture_default_str();
  }
  ia_solve->add_option("--max-iter", max_iter)->capture_default_str();
  ia_solve->add_option("--tol", tol)->capture_default_str();

  std::string config_path;
  auto* bench = app.add_subcommand("bench", "Run an experiment config file");
  bench->add_option("config", config_path, "JSON experiment config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*region) {
      run_region(g, alpha, snr, grid);
    } else if (*wsrm) {
      ExperimentConfig cfg;
      cfg.kind = ChannelKind::parallel;
      cfg.dims.users = users;
      cfg.dims.tones = tones;
      cfg.snr_db = snrs;
      for (const auto& a : algs) cfg.algorithms.push_back({a, json::object()});
      cfg.realizations = realizations;
      cfg.base_seed = g.seed;
      cfg.format = g.format;
      run_bench_config(g, cfg);
    } else if (*iw) {
      run_iwfa(g, users, tones, snr, schedule, damping, rate_target, max_iter);
    } else if (*power) {
      run_power(g, users, snr, target_db, beta, steps);
    } else if (*ia_check) {
      run_ia_check(g, users, m, n, d);
    } else if (*ia_solve) {
      run_ia_solve(g, users, m, n, d, max_iter, tol);
    } else if (*bench) {
      ExperimentConfig cfg = ExperimentConfig::load(config_path);
      if (app.get_option("--format")->count()) cfg.format = g.format;
      run_bench_config(g, cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const FeasibilityError& e) {
    std::cerr << "infeasible: " << e.what() << " (rho " << e.rho() << ")";
    if (e.user() >= 0) std::cerr << ", user " << e.user();
    std::cerr << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
