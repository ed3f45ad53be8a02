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

#include "icran/rate_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "icran/errors.hpp"

namespace icran {

namespace {

void require_two_users(int users) {
  if (users != 2) throw DimensionError("2-user routine called with " + std::to_string(users) + " users");
}

RatePoint rates_at(const ScalarChannel& ch, double p1, double p2) {
  double g11 = ch.power_gain(0, 0), g21 = ch.power_gain(1, 0);
  double g22 = ch.power_gain(1, 1), g12 = ch.power_gain(0, 1);
  return {std::log2(1.0 + g11 * p1 / (1.0 + g21 * p2)), std::log2(1.0 + g22 * p2 / (1.0 + g12 * p1))};
}

double cross(const RatePoint& o, const RatePoint& a, const RatePoint& b) {
  return (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1);
}

// Largest second difference along f on [a, b] confirmed at half the step.
double max_curvature(const auto& f, double a, double b, int samples) {
  double width = b - a;
  if (!(width > 1e-12)) return 0.0;
  double h = 1e-3 * width;
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    double t = a + h + (width - 2.0 * h) * (i + 0.5) / samples;
    double d1 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
    double hh = 0.5 * h;
    double d2 = (f(t + hh) - 2.0 * f(t) + f(t - hh)) / (hh * hh);
    worst = std::max(worst, std::min(d1, d2));
  }
  return worst;
}

}  // namespace

RegionSample frontier_2user(const ScalarChannel& ch, int grid_size) {
  require_two_users(ch.users());
  if (grid_size < 2) throw ParameterError("grid_size must be >= 2");
  const double pb1 = ch.budget(0), pb2 = ch.budget(1);
  RegionSample s;
  s.points.reserve(2 * grid_size);
  for (int i = 0; i < grid_size; ++i) {
    double t = static_cast<double>(i) / (grid_size - 1);
    s.points.push_back(rates_at(ch, pb1, t * pb2));
    s.labels.emplace_back("p1_full");
  }
  for (int i = 0; i < grid_size; ++i) {
    double t = static_cast<double>(i) / (grid_size - 1);
    s.points.push_back(rates_at(ch, t * pb1, pb2));
    s.labels.emplace_back("p2_full");
  }
  s.hull = timeshare_hull(s.points);
  return s;
}

double frontier_phi1(const ScalarChannel& ch, double r1) {
  require_two_users(ch.users());
  double g11 = ch.power_gain(0, 0), g21 = ch.power_gain(1, 0);
  double g22 = ch.power_gain(1, 1), g12 = ch.power_gain(0, 1);
  if (!(g21 > 0.0)) throw DegenerateChannelError("phi1 is undefined without interference at receiver 1");
  double pb = ch.budget(0);
  double x = std::expm1(r1 * std::numbers::ln2);
  return std::log2(1.0 + (g22 / g21) * (g11 * pb - x) / (x * (1.0 + g12 * pb)));
}

double frontier_phi2(const ScalarChannel& ch, double r1) {
  require_two_users(ch.users());
  double g11 = ch.power_gain(0, 0), g21 = ch.power_gain(1, 0);
  double g22 = ch.power_gain(1, 1), g12 = ch.power_gain(0, 1);
  double pb = ch.budget(1);
  double x = std::expm1(r1 * std::numbers::ln2);
  return std::log2(1.0 + g22 * pb / (1.0 + (g12 / g11) * (1.0 + g21 * pb) * x));
}

std::vector<RatePoint> brute_force_region(const ScalarChannel& ch, int grid, Exec exec) {
  require_two_users(ch.users());
  if (grid < 1) throw ParameterError("grid must be >= 1");
  const int n = grid + 1;
  std::vector<RatePoint> out(static_cast<std::size_t>(n) * n);
  const double pb1 = ch.budget(0), pb2 = ch.budget(1);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel) num_threads(worker_count())
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(i) * n + j] =
          rates_at(ch, pb1 * i / grid, pb2 * j / grid);
  return out;
}

std::vector<RatePoint> pareto_filter(const std::vector<RatePoint>& points) {
  std::vector<RatePoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(), [](const RatePoint& a, const RatePoint& b) {
    return a.r1 != b.r1 ? a.r1 > b.r1 : a.r2 > b.r2;
  });
  std::vector<RatePoint> out;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : sorted)
    if (p.r2 > best) {
      out.push_back(p);
      best = p.r2;
    }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<RatePoint> timeshare_hull(const std::vector<RatePoint>& points) {
  std::vector<RatePoint> pts = points;
  double m1 = 0.0, m2 = 0.0;
  for (const auto& p : points) {
    if (p.r1 < 0.0 || p.r2 < 0.0) throw DomainError("rates must be nonnegative");
    m1 = std::max(m1, p.r1);
    m2 = std::max(m2, p.r2);
  }
  pts.push_back({0.0, 0.0});
  pts.push_back({m1, 0.0});
  pts.push_back({0.0, m2});
  std::sort(pts.begin(), pts.end(), [](const RatePoint& a, const RatePoint& b) {
    return a.r1 != b.r1 ? a.r1 < b.r1 : a.r2 < b.r2;
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<RatePoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::vector<RatePoint> timeshare_hull(const RegionSample& sample) { return timeshare_hull(sample.points); }

ConvexityReport convexity_2user(const ScalarChannel& ch, int num_h) {
  require_two_users(ch.users());
  if (num_h < 1) throw ParameterError("num_h must be >= 1");
  double g11 = ch.power_gain(0, 0), g21 = ch.power_gain(1, 0);
  double g22 = ch.power_gain(1, 1), g12 = ch.power_gain(0, 1);
  const double pb1 = ch.budget(0), pb2 = ch.budget(1);
  double corner = rates_at(ch, pb1, pb2).r1;
  double top = rates_at(ch, pb1, 0.0).r1;

  ConvexityReport rep;
  double worst = max_curvature([&](double r) { return frontier_phi2(ch, r); }, 0.0, corner, num_h);
  if (g21 > 0.0)
    worst = std::max(worst, max_curvature([&](double r) { return frontier_phi1(ch, r); }, corner, top, num_h));
  rep.max_curvature = worst;
  rep.convex = !(worst > 1e-8);

  // The printed inequality assumes pbar1 = pbar2 = pbar; pbar1 is used.
  const double pb = pb1;
  const double lead = g22 * g12 * pb * (1.0 + g21 * pb);
  rep.necessary_holds = lead - g11 * (1.0 + std::sqrt(g22) * pb) < 0.0;
  rep.necessary_holds_squared = lead - g11 * (1.0 + g22 * pb) < 0.0;
  return rep;
}

NeEfficiency ne_efficiency_2user(const ScalarChannel& ch, int grid_size) {
  require_two_users(ch.users());
  NeEfficiency out;
  Eigen::VectorXd full(2);
  full << ch.budget(0), ch.budget(1);
  out.ne_rates = rate_scalar(ch, full);
  out.ne_sum = out.ne_rates.sum();
  RegionSample s = frontier_2user(ch, grid_size);
  double best = 0.0;
  for (const auto& p : s.hull) best = std::max(best, p.r1 + p.r2);
  out.best_timeshare_sum = best;
  out.gap = best - out.ne_sum;
  return out;
}

Eigen::VectorXcd miso_pareto_beamformer(const MisoChannel& ch, int k, double lambda) {
  require_two_users(ch.users());
  if (k < 0 || k > 1) throw DimensionError("user index out of range");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
  const int j = 1 - k;
  Eigen::VectorXcd h = ch.gain(k, k).adjoint();
  Eigen::VectorXcd c = ch.gain(k, j).adjoint();
  double nh = h.norm();
  if (!(nh > 0.0)) throw DegenerateChannelError("zero direct channel for user " + std::to_string(k));
  Eigen::VectorXcd mrt = h / nh;
  Eigen::VectorXcd zf = h;
  double nc2 = c.squaredNorm();
  if (nc2 > 0.0) zf -= c * (c.dot(h) / nc2);
  double nz = zf.norm();
  if (!(nz > 1e-12 * nh))
    throw DegenerateChannelError("direct and cross channels of user " + std::to_string(k) +
                                 " are parallel; zero-forcing is empty");
  zf /= nz;
  Eigen::VectorXcd mix = lambda * zf + (1.0 - lambda) * mrt;
  return mix * (std::sqrt(ch.budget(k)) / mix.norm());
}

RegionSample miso_pareto_2user(const MisoChannel& ch, int grid) {
  require_two_users(ch.users());
  if (ch.tx_antennas() < 2) throw DimensionError("MISO Pareto sweep needs at least two antennas");
  if (grid < 2) throw ParameterError("grid must be >= 2");
  std::vector<Eigen::VectorXcd> v1(grid), v2(grid);
  for (int i = 0; i < grid; ++i) {
    double lam = static_cast<double>(i) / (grid - 1);
    v1[i] = miso_pareto_beamformer(ch, 0, lam);
    v2[i] = miso_pareto_beamformer(ch, 1, lam);
  }
  std::vector<RatePoint> cloud;
  cloud.reserve(static_cast<std::size_t>(grid) * grid);
  for (int a = 0; a < grid; ++a)
    for (int b = 0; b < grid; ++b) {
      Eigen::VectorXd r = rate_miso(ch, {v1[a], v2[b]});
      cloud.push_back({r[0], r[1]});
    }
  RegionSample s;
  s.points = pareto_filter(cloud);
  s.labels.assign(s.points.size(), "miso");
  s.hull = timeshare_hull(s.points);
  return s;
}

bool fdma_optimality_check(const ParallelChannel& ch, int c, FdmaMode mode) {
  if (c < 2) throw ParameterError("C must be >= 2");
  const double base = 1.0 + 1.0 / (c - 1);
  const double thr = 0.25 * base * base;
  const int K = ch.users();
  if (mode == FdmaMode::two_user) {
    require_two_users(K);
    for (int n = 0; n < ch.tones(); ++n) {
      double a = ch.power_gain(n, 0, 1) / ch.power_gain(n, 1, 1);
      double b = ch.power_gain(n, 1, 0) / ch.power_gain(n, 0, 0);
      if (!(a * b > thr)) return false;
    }
    return true;
  }
  for (int n = 0; n < ch.tones(); ++n)
    for (int l = 0; l < K; ++l)
      for (int k = 0; k < K; ++k) {
        if (l == k) continue;
        double a = ch.power_gain(n, l, k) / ch.power_gain(n, k, k);
        double b = ch.power_gain(n, k, l) / ch.power_gain(n, l, l);
        if (!(a > 0.5) || !(a * b > thr)) return false;
      }
  return true;
}

}  // namespace icran
