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
#include "icran/power_control.hpp"
#include "oracles.hpp"

using namespace icran;

namespace {

// Random K-user instance with common target scaled so rho(A) = rho.
std::pair<ScalarChannel, std::vector<double>> feasible_instance(int K, std::uint64_t seed, double rho) {
  auto ch = gen_scalar(K, seed);
  std::vector<double> unit(K, 1.0);
  const double base = oracle::spectral_radius(target_gain_matrix(ch, unit));
  return {ch, std::vector<double>(K, rho / base)};
}

}  // namespace

TEST_SUITE("power_control") {
  TEST_CASE("spectral radius closed forms") {
    CHECK(spectral_radius(Eigen::MatrixXd::Identity(4, 4)) == doctest::Approx(1.0).epsilon(1e-10));
    Eigen::Matrix2d m;
    m << 1.0, 0.3, 0.3, 1.0;
    CHECK(spectral_radius(m) == doctest::Approx(1.3).epsilon(1e-10));
    m << 0.0, 0.5, 0.5, 0.0;
    CHECK(spectral_radius(m) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(spectral_radius(Eigen::MatrixXd::Zero(3, 3)) == 0.0);
  }

  TEST_CASE("spectral radius matches an eigensolver") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
      const int K = 2 + t % 7;
      Eigen::MatrixXd m(K, K);
      for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) m(i, j) = u(gen) < 0.3 ? 0.0 : u(gen);
      const double ref = oracle::spectral_radius(m);
      CHECK(spectral_radius(m) == doctest::Approx(ref).epsilon(1e-9));
    }
  }

  TEST_CASE("gain matrices") {
    auto ch = gen_scalar(4, 2);
    auto z = gain_ratio_matrix(ch);
    const std::vector<double> gamma{0.5, 1.0, 2.0, 0.1};
    auto a = target_gain_matrix(ch, gamma);
    for (int k = 0; k < 4; ++k) {
      CHECK(z(k, k) == 1.0);
      CHECK(a(k, k) == 0.0);
      for (int l = 0; l < 4; ++l)
        if (l != k) {
          const double ratio = ch.power_gain(l, k) / ch.power_gain(k, k);
          CHECK(z(k, l) == doctest::Approx(ratio));
          CHECK(a(k, l) == doctest::Approx(gamma[k] * ratio));
        }
    }
  }

  TEST_CASE("max-min optimum closed forms") {
    CHECK(maxmin_sinr_optimum(testing::symmetric2(0.5)) == doctest::Approx(2.0));
    CHECK(maxmin_sinr_optimum(testing::symmetric2(1.0)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(maxmin_sinr_optimum(testing::symmetric2(0.0)), DegenerateChannelError);
    CHECK_THROWS_AS(maxmin_sinr_optimum(gen_scalar(1, 1)), DimensionError);
  }

  TEST_CASE("max-min optimum matches the noise-free grid") {
    const int grid = 400;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto ch = gen_scalar(2, seed);
      const double gamma = maxmin_sinr_optimum(ch);
      const double best = oracle::grid_maxmin_sir(oracle::gains(ch), grid);
      CHECK(best <= gamma * (1.0 + 1e-12));
      CHECK(best >= gamma * (1.0 - 2.0 / grid * 4));
    }
  }

  TEST_CASE("apc") {
    auto ch = testing::symmetric2(0.5);
    SUBCASE("fixed point") {
      const PowerVector p = PowerVector::Ones(2);
      const double s = sinr_scalar(ch, p)[0];
      auto next = apc_step(ch, p, s, 0.3);
      CHECK(next[0] == doctest::Approx(1.0));
      CHECK(next[1] == doctest::Approx(1.0));
    }
    SUBCASE("zero step is the identity") {
      const PowerVector p(Eigen::Vector2d(0.3, 0.8));
      CHECK(apc_step(ch, p, 2.0, 0.0) == p);
      CHECK_THROWS_AS(apc_step(ch, p, 2.0, -0.1), ParameterError);
    }
    SUBCASE("error to the optimum decreases") {
      const double gamma = maxmin_sinr_optimum(ch);
      PowerVector p = PowerVector::Ones(2);
      double prev = (sinr_scalar(ch, p).array() - gamma).abs().maxCoeff();
      for (int t = 0; t < 500; ++t) {
        p = apc_step(ch, p, gamma, 0.1);
        const double err = (sinr_scalar(ch, p).array() - gamma).abs().maxCoeff();
        REQUIRE(err < prev);
        prev = err;
      }
    }
  }

  TEST_CASE("min-power closed form") {
    auto ch = testing::symmetric2(0.5);
    const std::vector<double> gamma{1.0, 1.0};
    auto p = minpower_closed_form(ch, gamma);
    CHECK(p[0] == doctest::Approx(2.0));
    CHECK(p[1] == doctest::Approx(2.0));
    auto s = sinr_scalar(ch, p);
    CHECK(s[0] == doctest::Approx(1.0));

    auto free = testing::symmetric2(0.0);
    auto pf = minpower_closed_form(free, std::vector<double>{3.0, 0.5});
    CHECK(pf[0] == doctest::Approx(3.0));
    CHECK(pf[1] == doctest::Approx(0.5));
    CHECK(minpower_closed_form(ch, std::vector<double>{0.0, 0.0}).isZero());
  }

  TEST_CASE("feasibility follows rho(A)") {
    auto ch = testing::symmetric2(1.2);
    const std::vector<double> gamma{1.0, 1.0};
    auto rep = minpower_feasible(ch, gamma);
    CHECK_FALSE(rep.feasible);
    CHECK(rep.rho == doctest::Approx(1.2));
    try {
      minpower_closed_form(ch, gamma);
      FAIL("expected infeasibility");
    } catch (const FeasibilityError& e) {
      CHECK(e.rho() == doctest::Approx(1.2));
    }
    CHECK(minpower_feasible(testing::symmetric2(0.8), gamma).feasible);
  }

  TEST_CASE("closed form meets every target exactly") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      auto [ch, gamma] = feasible_instance(2 + seed % 7, seed, 0.7);
      auto p = minpower_closed_form(ch, gamma);
      auto s = sinr_scalar(ch, p);
      for (int k = 0; k < ch.users(); ++k) CHECK(std::abs(s[k] - gamma[k]) < 1e-9);
    }
  }

  TEST_CASE("closed form is componentwise minimal") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(-0.1, 1.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto [ch, gamma] = feasible_instance(4, seed, 0.6);
      auto p = minpower_closed_form(ch, gamma);
      int feasible = 0;
      for (int draw = 0; draw < 100000 && feasible < 100; ++draw) {
        PowerVector q(4);
        for (int k = 0; k < 4; ++k) q[k] = p[k] * (1.0 + u(gen));
        auto s = sinr_scalar(ch, q);
        bool ok = true;
        for (int k = 0; k < 4; ++k) ok = ok && s[k] >= gamma[k];
        if (!ok) continue;
        ++feasible;
        for (int k = 0; k < 4; ++k) CHECK(q[k] >= p[k] - 1e-9);
      }
      CHECK(feasible == 100);
    }
  }

  TEST_CASE("yates") {
    auto ch = testing::symmetric2(0.5);
    const std::vector<double> gamma{1.0, 1.0};
    SUBCASE("converges to the closed form") {
      auto tr = yates_fixed_point(ch, gamma, PowerVector::Zero(2));
      CHECK(tr.converged);
      CHECK(std::abs(tr.final_iterate[0] - 2.0) < 1e-8);
      CHECK(std::abs(tr.final_iterate[1] - 2.0) < 1e-8);
      CHECK(tr.objective_history.size() == static_cast<std::size_t>(tr.iterations) + 1);
    }
    SUBCASE("starting at the solution stops at once") {
      auto tr = yates_fixed_point(ch, gamma, minpower_closed_form(ch, gamma));
      CHECK(tr.converged);
      CHECK(tr.iterations == 1);
    }
    SUBCASE("infeasible targets diverge") {
      auto tr = yates_fixed_point(testing::symmetric2(1.2), gamma, PowerVector::Zero(2));
      CHECK_FALSE(tr.converged);
      CHECK(tr.termination == Termination::diverged);
    }
  }

  TEST_CASE("yates limit matches the closed form on random instances") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const int K = 2 + seed % 7;
      auto [ch, gamma] = feasible_instance(K, 1000 + seed, 0.3 + 0.006 * seed);
      auto p = minpower_closed_form(ch, gamma);
      auto tr = yates_fixed_point(ch, gamma, PowerVector::Zero(K));
      REQUIRE(tr.converged);
      CHECK((tr.final_iterate - p).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("yates contraction factor tracks rho(A)") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const double rho = 0.3 + 0.02 * seed;
      auto [ch, gamma] = feasible_instance(2 + seed % 5, 2000 + seed, rho);
      YatesOptions o;
      o.tol = 1e-14;
      auto tr = yates_fixed_point(ch, gamma, PowerVector::Zero(ch.users()), o);
      const double c = estimate_contraction(tr.residual_history, 1e-9);
      CHECK(c < 1.0);
      CHECK(std::abs(c - rho) < 0.05);
    }
  }
}
