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


#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "icran/alignment.hpp"
#include "icran/experiment.hpp"
#include "icran/power_control.hpp"
#include "icran/rate_region.hpp"
#include "icran/waterfilling.hpp"
#include "icran/wsrm.hpp"
#include "oracles.hpp"

using namespace icran;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome ac1_monotone() {
  const auto t0 = std::chrono::steady_clock::now();
  int bad = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double snr = 5.0 * static_cast<double>(seed % 5);
    auto par = gen_parallel(3, 4, seed).with_budgets(budgets_from_snr_db(3, snr));
    const std::vector<double> mu{1.0, 0.5 + 0.1 * static_cast<double>(seed % 4), 2.0};
    auto w = wmmse_parallel(par, mu);
    auto m = mdp_solve(par, mu);
    auto s = scale_solve(par, mu);
    auto mimo = gen_mimo(std::vector<AntennaPair>(3, {2, 2}), seed).with_budgets(budgets_from_snr_db(3, snr));
    auto wm = wmmse_mimo(mimo, std::vector<int>(3, 1));
    auto miso = gen_miso(3, 3, seed).with_budgets(budgets_from_snr_db(3, snr));
    auto c = cca_miso(miso, UtilitySpec::sum_rate(mu));
    for (const auto* h : {&w.objective_history, &m.objective_history, &s.objective_history,
                          &wm.objective_history, &c.objective_history})
      if (!testing::nondecreasing(*h, 1e-9)) ++bad;
  }
  const double t = seconds_since(t0);
  return {bad == 0 && t < 120.0, format("%d of 500 histories decrease, %.1f s", bad, t)};
}

Outcome ac2_wsrm_comparison(std::vector<double>& wall_ms) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int users : {10, 20}) {
    ExperimentConfig cfg;
    cfg.dims.users = users;
    cfg.dims.tones = 32;
    for (int s = 0; s <= 30; s += 5) cfg.snr_db.push_back(s);
    cfg.algorithms = {{"wmmse"}, {"mdp"}, {"scale"}};
    cfg.realizations = 20;
    cfg.base_seed = 1000 * static_cast<std::uint64_t>(users);
    auto table = run_experiment(cfg, Exec::parallel);
    for (const auto& row : table.rows) wall_ms.push_back(row.wall_time_ms);
    std::map<double, std::vector<double>> means;
    for (const auto& row : summarize(table)) means[row.snr_db].push_back(row.mean_sum_rate);
    for (const auto& [snr, m] : means) {
      const double hi = *std::max_element(m.begin(), m.end());
      const double lo = *std::min_element(m.begin(), m.end());
      std::printf("  K=%d snr=%g wmmse=%.4f mdp=%.4f scale=%.4f\n", users, snr, m[0], m[1], m[2]);
      worst = std::max(worst, (hi - lo) / hi);
    }
  }
  const double t = seconds_since(t0);
  return {worst < 0.05 && t < 600.0, format("largest relative spread %.4f, %.1f s", worst, t)};
}

double segment_distance(const RatePoint& p, const RatePoint& a, const RatePoint& b) {
  const double dx = b.r1 - a.r1, dy = b.r2 - a.r2;
  const double len2 = dx * dx + dy * dy;
  const double t = len2 > 0 ? std::clamp(((p.r1 - a.r1) * dx + (p.r2 - a.r2) * dy) / len2, 0.0, 1.0) : 0.0;
  return std::hypot(p.r1 - a.r1 - t * dx, p.r2 - a.r2 - t * dy);
}

Outcome ac3_regions() {
  auto weak = frontier_2user(testing::symmetric2(0.1));
  double cell = 0.0;
  for (std::size_t i = 1; i < weak.points.size(); ++i)
    if (weak.labels[i] == weak.labels[i - 1])
      cell = std::max(cell, std::hypot(weak.points[i].r1 - weak.points[i - 1].r1,
                                       weak.points[i].r2 - weak.points[i - 1].r2));
  auto hull = weak.hull;
  hull.push_back(hull.front());
  double gap = 0.0;
  for (const auto& p : weak.points) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) d = std::min(d, segment_distance(p, hull[i], hull[i + 1]));
    gap = std::max(gap, d);
  }
  const bool weak_ok = gap <= cell;

  auto strong = ne_efficiency_2user(testing::symmetric2(2.0));
  const bool strong_ok = std::abs(strong.ne_sum - 0.8301) <= 1e-4 && strong.best_timeshare_sum >= 1.0 &&
                         strong.ne_sum < strong.best_timeshare_sum;

  const int grid = 200;
  auto mid_ch = testing::symmetric2(0.5);
  auto mid = ne_efficiency_2user(mid_ch);
  double best = 0.0;
  for (const auto& p : brute_force_region(mid_ch, grid)) best = std::max(best, p.r1 + p.r2);
  // One grid step moves the sum rate by at most 2 / (grid ln 2) at unit budgets.
  const double resolution = 2.0 / (grid * std::log(2.0));
  const bool mid_ok = std::abs(mid.ne_sum - best) <= resolution;

  return {weak_ok && strong_ok && mid_ok,
          format("alpha=0.1 gap %.2e (cell %.2e); alpha=2 NE %.6f hull %.4f; alpha=0.5 NE %.6f grid %.6f",
                 gap, cell, strong.ne_sum, strong.best_timeshare_sum, mid.ne_sum, best)};
}

Outcome ac4_power_control() {
  double yates_err = 0.0;
  int yates_fail = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int K = 2 + static_cast<int>(seed % 7);
    auto ch = gen_scalar(K, 5000 + seed);
    const double base = oracle::spectral_radius(target_gain_matrix(ch, std::vector<double>(K, 1.0)));
    const std::vector<double> gamma(K, (0.3 + 0.006 * static_cast<double>(seed)) / base);
    auto p = minpower_closed_form(ch, gamma);
    auto tr = yates_fixed_point(ch, gamma, PowerVector::Zero(K));
    const double err = (tr.final_iterate - p).cwiseAbs().maxCoeff();
    yates_err = std::max(yates_err, err);
    if (!tr.converged || !(err < 1e-8)) ++yates_fail;
  }

  const int grid = 400;
  int gamma_fail = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto ch = gen_scalar(2, seed);
    const double gamma = maxmin_sinr_optimum(ch);
    const double best = oracle::grid_maxmin_sir(oracle::gains(ch), grid);
    if (best > gamma * (1.0 + 1e-12) || best < gamma * (1.0 - 8.0 / grid)) ++gamma_fail;
  }

  int apc_fail = 0;
  for (double alpha : {0.2, 0.5, 0.8}) {
    auto ch = testing::symmetric2(alpha);
    const double gamma = maxmin_sinr_optimum(ch);
    PowerVector p = PowerVector::Ones(2);
    double prev = (sinr_scalar(ch, p).array() - gamma).abs().maxCoeff();
    for (int t = 0; t < 500; ++t) {
      p = apc_step(ch, p, gamma, 0.1);
      const double err = (sinr_scalar(ch, p).array() - gamma).abs().maxCoeff();
      if (!(err < prev)) {
        ++apc_fail;
        break;
      }
      prev = err;
    }
  }
  return {yates_fail == 0 && gamma_fail == 0 && apc_fail == 0,
          format("yates max error %.2e (%d fail); gamma* %d of 20 fail; apc %d of 3 fail", yates_err,
                 yates_fail, gamma_fail, apc_fail)};
}

Outcome ac5_iwfa() {
  int tested = 0, fail = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; tested < 50; ++seed) {
    auto ch = testing::scaled_parallel(4, 8, seed, 0.02, 10.0);
    if (!cert_simultaneous(ch).holds) continue;
    ++tested;
    for (auto sched : {Schedule::sequential, Schedule::simultaneous}) {
      IwfaOptions o;
      o.schedule = sched;
      auto tr = iwfa(ch, o);
      const double r = ne_residual(ch, tr.final_iterate);
      worst = std::max(worst, r);
      if (!tr.converged || !(r < 1e-6)) ++fail;
    }
  }
  int sym_fail = 0;
  for (double ratio : {0.5, 1.0, 2.0, 3.0})
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto ch = testing::symmetric_crosstalk(3, 4, seed, ratio, 10.0);
      IwfaOptions o;
      o.max_iter = 5000;
      auto tr = iwfa(ch, o);
      if (!tr.converged || !(ne_residual(ch, tr.final_iterate) < 1e-6)) ++sym_fail;
    }
  return {fail == 0 && sym_fail == 0,
          format("certified: %d of 100 runs fail, worst residual %.2e; symmetric: %d of 40 fail", fail, worst,
                 sym_fail)};
}

Outcome ac6_alignment() {
  const DofProfile ok{{1, 1, 1}, std::vector<AntennaPair>(3, {2, 2})};
  auto verdict = feasibility_necessary(ok);
  const bool check_ok = verdict.feasible() && verdict.pairs.size() == 6;

  int aligned = 0, rank_fail = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto ch = gen_mimo(std::vector<AntennaPair>(3, {2, 2}), 7000 + seed);
    IaOptions o;
    o.max_iter = 5000;
    o.seed = seed;
    auto r = ia_altmin(ch, {1, 1, 1}, o);
    if (!(r.leakage_history.back() < 1e-8)) continue;
    ++aligned;
    if (!ia_residual(ch, r.U, r.V, {1, 1, 1}).rank_ok) ++rank_fail;
  }

  const DofProfile two{{2, 2, 2}, std::vector<AntennaPair>(3, {2, 2})};
  const DofProfile four{{1, 1, 1, 1}, std::vector<AntennaPair>(4, {2, 2})};
  const bool rejected = !feasibility_necessary(two).feasible() && !feasibility_necessary(four).feasible() &&
                        !symmetric_feasible(2, 2, 3) && !symmetric_feasible(2, 1, 4);
  return {check_ok && aligned >= 45 && rank_fail == 0 && rejected,
          format("check %s over %d subsets; aligned %d of 50, rank failures %d; infeasible cases %s",
                 check_ok ? "passes" : "fails", 1 << verdict.pairs.size(), aligned, rank_fail,
                 rejected ? "rejected" : "accepted")};
}

Outcome ac7_gradients() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int K = 2 + static_cast<int>(seed % 3), M = 2 + static_cast<int>(seed % 2);
    auto ch = gen_miso(K, M, 9000 + seed);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 0.4);
    Eigen::VectorXd x(2 * K * M);
    for (auto& e : x) e = nd(gen);
    auto unpack = [&](const Eigen::VectorXd& y) {
      BeamVectors v(K, Eigen::VectorXcd(M));
      for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m) v[k][m] = {y[2 * (k * M + m)], y[2 * (k * M + m) + 1]};
      return v;
    };
    auto fd = numeric_gradient([&](const Eigen::VectorXd& y) { return rate_miso(ch, unpack(y)).sum(); }, x);
    const auto v = unpack(x);
    Eigen::VectorXd analytic(2 * K * M);
    for (int k = 0; k < K; ++k) {
      auto g = cca_gradient(ch, UtilitySpec::sum_rate(), v, k);
      for (int m = 0; m < M; ++m) {
        analytic[2 * (k * M + m)] = g[m].real();
        analytic[2 * (k * M + m) + 1] = g[m].imag();
      }
    }
    worst = std::max(worst, (analytic - fd).norm() / fd.norm());
  }
  return {worst < 1e-5, format("largest relative error %.2e", worst)};
}

Outcome ac8_embedding() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int K = 2 + static_cast<int>(seed % 3), N = 2 + static_cast<int>(seed % 4);
    auto ch = gen_parallel(K, N, 11000 + seed).with_budgets(budgets_from_snr_db(K, 5.0 * (seed % 5)));
    auto par = wmmse_parallel(ch);
    auto init = wmmse_parallel_init(ch);
    std::vector<Eigen::MatrixXcd> v0;
    for (int k = 0; k < K; ++k) v0.push_back(init.v.row(k).transpose().asDiagonal());
    auto mimo = wmmse_mimo(embed_parallel_as_mimo(ch), std::vector<int>(K, N), {}, {}, v0);
    worst = std::max(worst, std::abs(mimo.objective_history.back() - par.objective_history.back()));
  }
  return {worst < 1e-6, format("largest objective difference %.2e", worst)};
}

Outcome ac9_wall_time(const std::vector<double>& wall_ms) {
  if (wall_ms.empty()) return {false, "no rows recorded"};
  std::vector<double> w = wall_ms;
  std::sort(w.begin(), w.end());
  const bool recorded = w.front() >= 0.0;
  return {recorded, format("informational: %zu cells, median %.1f ms, max %.1f ms", w.size(), w[w.size() / 2],
                           w.back())};
}

}  // namespace

int main() {
  std::vector<double> wall_ms;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1", ac1_monotone},
      {"AC2", [&] { return ac2_wsrm_comparison(wall_ms); }},
      {"AC3", ac3_regions},
      {"AC4", ac4_power_control},
      {"AC5", ac5_iwfa},
      {"AC6", ac6_alignment},
      {"AC7", ac7_gradients},
      {"AC8", ac8_embedding},
      {"AC9", [&] { return ac9_wall_time(wall_ms); }},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s: %s %s\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
