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

#include <string>
#include <vector>

#include "icran/channels.hpp"
#include "icran/parallel.hpp"

namespace icran {

struct RatePoint {
  double r1 = 0.0;
  double r2 = 0.0;
  bool operator==(const RatePoint&) const = default;
};

struct RegionSample {
  std::vector<RatePoint> points;
  std::vector<std::string> labels;  // one per point
  std::vector<RatePoint> hull;      // counter-clockwise, starting at the origin
};

/// Two full-power edges of a 2-user scalar region, grid_size points each:
/// "p1_full" sweeps p2 over [0, pbar2] with p1 = pbar1, "p2_full" the
/// reverse. The hull is filled in.
RegionSample frontier_2user(const ScalarChannel& ch, int grid_size = 512);

/// Closed-form edge curves as functions of R1. phi1 is the p1 = pbar1 edge
/// for R1 in [R1(pbar1, pbar2), R1(pbar1, 0)], phi2 the p2 = pbar2 edge for
/// R1 in [0, R1(pbar1, pbar2)]. phi1 needs a nonzero |H_21|.
double frontier_phi1(const ScalarChannel& ch, double r1);
double frontier_phi2(const ScalarChannel& ch, double r1);

/// Rates on a (grid + 1) x (grid + 1) power grid.
std::vector<RatePoint> brute_force_region(const ScalarChannel& ch, int grid = 200,
                                          Exec exec = Exec::serial);

/// Points not strictly dominated by any other point, sorted by r1.
std::vector<RatePoint> pareto_filter(const std::vector<RatePoint>& points);

/// Convex hull of the points together with the origin and both axis
/// intercepts, counter-clockwise from the origin.
std::vector<RatePoint> timeshare_hull(const std::vector<RatePoint>& points);
std::vector<RatePoint> timeshare_hull(const RegionSample& sample);

struct ConvexityReport {
  bool convex = false;
  double max_curvature = 0.0;      // largest d2 Phi / dR1^2 seen on either curve
  bool necessary_holds = false;    // inequality with |H22| unsquared, as printed
  bool necessary_holds_squared = false;
};

/// Second differences of both edge curves at num_h interior points with step
/// 1e-3 of the R1 range, confirmed at half the step. Convex when no
/// confirmed stencil exceeds 1e-8.
ConvexityReport convexity_2user(const ScalarChannel& ch, int num_h = 200);

struct NeEfficiency {
  Eigen::VectorXd ne_rates;
  double ne_sum = 0.0;
  double best_timeshare_sum = 0.0;
  double gap = 0.0;
};

/// Both users at full power against the best sum rate on the time-sharing
/// hull of the sampled frontier.
NeEfficiency ne_efficiency_2user(const ScalarChannel& ch, int grid_size = 512);

/// MRT/ZF combination for user k: sqrt(pbar_k) (lam ZF + (1 - lam) MRT) /
/// ||lam ZF + (1 - lam) MRT||, so ||v_k||^2 = pbar_k. Throws
/// DegenerateChannelError when h_kk is parallel to the cross channel h_kj.
Eigen::VectorXcd miso_pareto_beamformer(const MisoChannel& ch, int k, double lambda);

/// Pareto-dominant rate pairs over a grid x grid sweep of (lam1, lam2).
RegionSample miso_pareto_2user(const MisoChannel& ch, int grid = 101);

enum class FdmaMode { general, two_user };

/// Strong-interference conditions under which FDMA is sum-rate optimal,
/// with C >= 2 the minimum number of tones per user.
bool fdma_optimality_check(const ParallelChannel& ch, int c, FdmaMode mode = FdmaMode::general);

}  // namespace icran
