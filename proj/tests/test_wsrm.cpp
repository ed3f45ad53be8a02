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

#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "icran/errors.hpp"
#include "icran/rate_region.hpp"
#include "icran/waterfilling.hpp"
#include "icran/wsrm.hpp"

using namespace icran;

namespace {

bool within_budgets(const PowerMatrix& p, const std::vector<double>& budgets) {
  for (Eigen::Index k = 0; k < p.rows(); ++k) {
    if (p.row(k).minCoeff() < 0.0) return false;
    if (p.row(k).sum() > budgets[k] * (1.0 + 1e-8)) return false;
  }
  return true;
}

Eigen::VectorXd direct_gains(const ParallelChannel& ch, int k) {
  Eigen::VectorXd g(ch.tones());
  for (int n = 0; n < ch.tones(); ++n) g[n] = ch.power_gain(n, k, k);
  return g;
}

// Unit-weight sum rate as a function of the stacked real and imaginary
// parts of every beamformer.
double miso_sum_rate(const MisoChannel& ch, const Eigen::VectorXd& x) {
  const int K = ch.users();
  const int M = ch.tx_antennas();
  BeamVectors v(K, Eigen::VectorXcd(M));
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m) v[k][m] = {x[2 * (k * M + m)], x[2 * (k * M + m) + 1]};
  return rate_miso(ch, v).sum();
}

}  // namespace

TEST_SUITE("wsrm") {
  TEST_CASE("prices vanish without crosstalk and are nonnegative") {
    auto free = testing::scaled_parallel(3, 4, 1, 0.0);
    CHECK(interference_prices(free, PowerMatrix::Constant(3, 4, 0.25)).isZero());
    auto ch = gen_parallel(3, 4, 1);
    CHECK(interference_prices(ch, PowerMatrix::Constant(3, 4, 0.25)).minCoeff() >= 0.0);
  }

  TEST_CASE("prices equal the marginal rate loss caused to others") {
    auto ch = gen_parallel(3, 4, 8);
    const std::vector<double> mu{1.0, 2.0, 0.5};
    PowerMatrix p = (PowerMatrix::Random(3, 4).array() + 1.5).matrix() * 0.2;
    auto t = interference_prices(ch, p, mu);
    for (int k = 0; k < 3; ++k) {
      auto others = [&](const Eigen::VectorXd& row) {
        PowerMatrix q = p;
        q.row(k) = row.transpose();
        auto r = rate_parallel(ch, q);
        double s = 0.0;
        for (int l = 0; l < 3; ++l)
          if (l != k) s += mu[l] * r[l];
        return s;
      };
      auto fd = numeric_gradient(others, p.row(k).transpose());
      for (int n = 0; n < 4; ++n) CHECK(t(k, n) == doctest::Approx(-fd[n] / mu[k]).epsilon(1e-6));
    }
  }

  TEST_CASE("priced best response without prices is water-filling") {
    auto ch = gen_parallel(3, 5, 2);
    PowerMatrix p = PowerMatrix::Constant(3, 5, 0.2);
    auto br = priced_best_response(ch, p, 1, Eigen::VectorXd::Zero(5));
    auto wf = waterfill(direct_gains(ch, 1), measure_npi(ch, p, 1), 1.0);
    CHECK((br - wf).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("mdp without crosstalk settles in one sweep") {
    auto ch = testing::scaled_parallel(3, 6, 4, 0.0, 3.0);
    auto tr = mdp_solve(ch);
    CHECK(tr.converged);
    CHECK(tr.iterations <= 2);
    for (int k = 0; k < 3; ++k) {
      auto wf = waterfill(direct_gains(ch, k), Eigen::VectorXd::Ones(6), 3.0);
      CHECK((tr.final_iterate.row(k).transpose() - wf).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("mdp does at least as well as the water-filling equilibrium") {
    // Pricing is a local method; seed 19 ends at a stationary point below
    // the equilibrium, which there is the global optimum.
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto ch = gen_parallel(2, 2, seed).with_budgets({10.0, 10.0});
      auto ne = iwfa(ch);
      MdpOptions o;
      o.tol = 1e-10;
      auto tr = mdp_solve(ch, {}, o);
      const bool ok = tr.objective_history.back() >= rate_parallel(ch, ne.final_iterate).sum() - 1e-9;
      if (seed == 0) CHECK(ok);
      wins += ok;
    }
    CHECK(wins >= 18);
  }

  TEST_CASE("scale lower bound") {
    auto [a, b] = log_bound_params(1.0);
    CHECK(a == doctest::Approx(0.5));
    CHECK(b == doctest::Approx(1.0));
    for (double z0 : {0.1, 1.0, 10.0}) {
      auto [al, be] = log_bound_params(z0);
      CHECK(al * std::log2(z0) + be == doctest::Approx(std::log2(1.0 + z0)).epsilon(1e-14));
      for (double e = -3.0; e <= 3.0; e += 0.01) {
        const double z = std::pow(10.0, e);
        CHECK(al * std::log2(z) + be <= std::log2(1.0 + z) + 1e-12);
      }
    }
    auto [a0, b0] = log_bound_params(0.0);
    CHECK(std::isfinite(a0));
    CHECK(std::isfinite(b0));
  }

  TEST_CASE("scale bound is tight at the refresh point") {
    auto ch = gen_parallel(3, 4, 6);
    PowerMatrix p = PowerMatrix::Constant(3, 4, 0.25);
    auto sp = scale_params(ch, p);
    CHECK(sp.alpha.minCoeff() >= 0.0);
    CHECK(sp.alpha.maxCoeff() <= 1.0);
    CHECK(scale_surrogate(ch, sp, p) == doctest::Approx(rate_parallel(ch, p).sum()).epsilon(1e-12));
  }

  TEST_CASE("wmmse single user single tone") {
    auto ch = gen_parallel(1, 1, 3).with_budgets({5.0});
    auto tr = wmmse_parallel(ch);
    CHECK(tr.final_iterate(0, 0) == doctest::Approx(5.0));
    CHECK(tr.final_rates[0] == doctest::Approx(std::log2(1.0 + 5.0 * ch.power_gain(0, 0, 0))));
  }

  TEST_CASE("wmmse receivers are MMSE and weights invert the error") {
    auto ch = gen_parallel(3, 4, 5).with_budgets({4.0, 4.0, 4.0});
    auto s = wmmse_parallel_init(ch);
    for (int it = 0; it < 5; ++it) {
      wmmse_parallel_update_uw(ch, s);
      auto e = wmmse_parallel_mse(ch, s);
      for (int k = 0; k < 3; ++k)
        for (int n = 0; n < 4; ++n) {
          double rx = 1.0;
          for (int l = 0; l < 3; ++l) rx += ch.power_gain(n, l, k) * std::norm(s.v(l, n));
          const Complex u = ch.gain(n, k, k) * s.v(k, n) / rx;
          CHECK(std::abs(s.u(k, n) - u) < 1e-12);
          CHECK(s.w(k, n) * e(k, n) == doctest::Approx(1.0).epsilon(1e-10));
        }
      wmmse_parallel_update_v(ch, {}, s);
    }
  }

  TEST_CASE("wmmse terminates at a fixed point of its weights") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto ch = gen_parallel(4, 6, seed).with_budgets(budgets_from_snr_db(4, 10.0));
      WmmseOptions o;
      auto tr = wmmse_parallel(ch, {}, o);
      REQUIRE(tr.converged);
      WmmseParallelState s = wmmse_parallel_init(ch);
      s.v = tr.final_iterate.cwiseSqrt().cast<Complex>();
      wmmse_parallel_update_uw(ch, s);
      const double logw = s.w.array().log().sum();
      CHECK(logw == doctest::Approx(std::log(2.0) * tr.final_rates.sum()).epsilon(1e-10));
      const auto& h = tr.objective_history;
      CHECK(std::log(2.0) * std::abs(h[h.size() - 1] - h[h.size() - 2]) <= o.epsilon);
    }
  }

  TEST_CASE("mimo wmmse single user identity channel") {
    MimoChannel ch({{3, 3}}, {Eigen::MatrixXcd::Identity(3, 3)}, {6.0});
    const std::vector<int> d{3};
    WmmseOptions o;
    o.epsilon = 1e-12;
    auto tr = wmmse_mimo(ch, d, {}, o);
    CHECK(tr.final_rates[0] == doctest::Approx(3.0 * std::log2(1.0 + 2.0)).epsilon(1e-8));
    CHECK_THROWS_AS(wmmse_mimo(ch, std::vector<int>{4}), DimensionError);
  }

  TEST_CASE("mimo wmmse on an embedded channel follows parallel wmmse") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto ch = gen_parallel(3, 4, seed).with_budgets(budgets_from_snr_db(3, 10.0));
      auto par = wmmse_parallel(ch);
      auto init = wmmse_parallel_init(ch);
      std::vector<Eigen::MatrixXcd> v0;
      for (int k = 0; k < 3; ++k) v0.push_back(init.v.row(k).transpose().asDiagonal());
      auto mimo = wmmse_mimo(embed_parallel_as_mimo(ch), std::vector<int>(3, 4), {}, {}, v0);
      CHECK(mimo.iterations == par.iterations);
      CHECK(std::abs(mimo.objective_history.back() - par.objective_history.back()) < 1e-6);
    }
  }

  TEST_CASE("utility admissibility") {
    CHECK(utility_admissible(UtilitySpec::sum_rate({1.0, 2.0})));
    CHECK_FALSE(utility_admissible(UtilitySpec::parse("minrate")));
    CHECK_FALSE(utility_admissible(UtilitySpec::parse("propfair")));
  }

  TEST_CASE("every solver history is nondecreasing and feasible") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      auto ch = gen_parallel(3, 4, seed).with_budgets(budgets_from_snr_db(3, 5.0 * (seed % 5)));
      const std::vector<double> mu{1.0, 0.5 + 0.1 * (seed % 4), 2.0};
      auto w = wmmse_parallel(ch, mu);
      auto m = mdp_solve(ch, mu);
      auto s = scale_solve(ch, mu);
      for (const auto* tr : {&w, &m, &s}) {
        CHECK(testing::nondecreasing(tr->objective_history, 1e-9));
        CHECK(within_budgets(tr->final_iterate, ch.budgets()));
        CHECK(tr->objective_history.size() == static_cast<std::size_t>(tr->iterations) + 1);
        CHECK(tr->objective_history.back() == doctest::Approx(weighted_sum(mu, tr->final_rates)));
      }
      auto mimo_ch = gen_mimo(std::vector<AntennaPair>(3, {3, 3}), seed);
      auto mm = wmmse_mimo(mimo_ch, std::vector<int>(3, 2));
      CHECK(testing::nondecreasing(mm.objective_history, 1e-9));
      for (int k = 0; k < 3; ++k) CHECK(mm.final_iterate.V[k].squaredNorm() <= 1.0 + 1e-8);
      auto miso = gen_miso(3, 3, seed);
      auto c = cca_miso(miso, UtilitySpec::sum_rate());
      CHECK(testing::nondecreasing(c.objective_history, 1e-9));
      for (int k = 0; k < 3; ++k) CHECK(c.final_iterate[k].squaredNorm() <= 1.0 + 1e-8);
    }
  }

  TEST_CASE("relabeling users permutes simultaneous-update solutions") {
    const std::vector<int> perm{2, 0, 1};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto ch = gen_parallel(3, 5, seed).with_budgets(budgets_from_snr_db(3, 10.0));
      auto pc = testing::permute_users(ch, perm);
      auto a = wmmse_parallel(ch);
      auto b = wmmse_parallel(pc);
      auto sa = scale_solve(ch);
      auto sb = scale_solve(pc);
      IwfaOptions o;
      o.schedule = Schedule::simultaneous;
      auto ia = iwfa(ch, o);
      auto ib = iwfa(pc, o);
      for (int i = 0; i < 3; ++i) {
        CHECK((a.final_iterate.row(perm[i]) - b.final_iterate.row(i)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((sa.final_iterate.row(perm[i]) - sb.final_iterate.row(i)).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((ia.final_iterate.row(perm[i]) - ib.final_iterate.row(i)).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }

  TEST_CASE("scale tracks wmmse at moderate snr") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      auto ch = gen_parallel(10, 32, seed).with_budgets(budgets_from_snr_db(10, 10.0));
      const double w = wmmse_parallel(ch).final_rates.sum();
      const double s = scale_solve(ch).final_rates.sum();
      CHECK(std::abs(s - w) <= 0.05 * w);
    }
  }

  TEST_CASE("cca single user reaches matched filtering at full power") {
    auto ch = gen_miso(1, 4, 2).with_budgets({3.0});
    auto tr = cca_miso(ch, UtilitySpec::sum_rate());
    CHECK(tr.converged);
    const double h2 = ch.gain(0, 0).squaredNorm();
    CHECK(tr.final_rates[0] == doctest::Approx(std::log2(1.0 + 3.0 * h2)).epsilon(1e-8));
    CHECK(tr.residual_history.back() < CcaOptions{}.tol);
  }

  TEST_CASE("cca gradient matches finite differences") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto ch = gen_miso(3, 3, seed);
      std::mt19937_64 gen(seed);
      std::normal_distribution<double> nd(0.0, 0.4);
      Eigen::VectorXd x(2 * 9);
      for (auto& e : x) e = nd(gen);
      auto fd = numeric_gradient([&](const Eigen::VectorXd& y) { return miso_sum_rate(ch, y); }, x);
      BeamVectors v(3, Eigen::VectorXcd(3));
      for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 3; ++m) v[k][m] = {x[2 * (k * 3 + m)], x[2 * (k * 3 + m) + 1]};
      Eigen::VectorXd analytic(18);
      for (int k = 0; k < 3; ++k) {
        auto g = cca_gradient(ch, UtilitySpec::sum_rate(), v, k);
        for (int m = 0; m < 3; ++m) {
          analytic[2 * (k * 3 + m)] = g[m].real();
          analytic[2 * (k * 3 + m) + 1] = g[m].imag();
        }
      }
      CHECK((analytic - fd).norm() / fd.norm() < 1e-5);
    }
  }

  TEST_CASE("cca rejects non-smooth utilities") {
    CHECK_THROWS_AS(cca_miso(gen_miso(2, 2, 1), UtilitySpec::parse("minrate")), NonSmoothError);
  }

  TEST_CASE("cca stationary points are not dominated by the MISO frontier") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto ch = gen_miso(2, 3, seed).with_budgets({10.0, 10.0});
      auto tr = cca_miso(ch, UtilitySpec::sum_rate());
      auto frontier = miso_pareto_2user(ch);
      const double r1 = tr.final_rates[0], r2 = tr.final_rates[1];
      for (const auto& q : frontier.points) CHECK_FALSE((q.r1 > r1 + 1e-6 && q.r2 > r2 + 1e-6));
    }
  }
}
