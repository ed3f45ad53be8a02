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

#include "icran/alignment.hpp"
#include "icran/rate_region.hpp"
#include "icran/waterfilling.hpp"
#include "icran/wsrm.hpp"

using namespace icran;

// Each parallel kernel must reproduce its serial reference bit for bit.
TEST_SUITE("parallel") {
  TEST_CASE("simultaneous iwfa") {
    auto ch = gen_parallel(8, 16, 3).with_budgets(budgets_from_snr_db(8, 10.0));
    IwfaOptions o;
    o.schedule = Schedule::simultaneous;
    o.max_iter = 50;
    auto a = iwfa(ch, o);
    o.exec = Exec::parallel;
    auto b = iwfa(ch, o);
    CHECK(a.final_iterate == b.final_iterate);
    CHECK(a.residual_history == b.residual_history);
  }

  TEST_CASE("parallel wmmse") {
    auto ch = gen_parallel(8, 16, 4).with_budgets(budgets_from_snr_db(8, 20.0));
    WmmseOptions o;
    auto a = wmmse_parallel(ch, {}, o);
    o.exec = Exec::parallel;
    auto b = wmmse_parallel(ch, {}, o);
    CHECK(a.final_iterate == b.final_iterate);
    CHECK(a.objective_history == b.objective_history);
  }

  TEST_CASE("mimo wmmse") {
    auto ch = gen_mimo(std::vector<AntennaPair>(4, {3, 3}), 5);
    WmmseOptions o;
    const std::vector<int> d(4, 2);
    auto a = wmmse_mimo(ch, d, {}, o);
    o.exec = Exec::parallel;
    auto b = wmmse_mimo(ch, d, {}, o);
    CHECK(a.objective_history == b.objective_history);
    for (int k = 0; k < 4; ++k) CHECK(a.final_iterate.V[k] == b.final_iterate.V[k]);
  }

  TEST_CASE("brute-force region") {
    auto ch = gen_scalar(2, 6);
    CHECK(brute_force_region(ch, 150, Exec::serial) == brute_force_region(ch, 150, Exec::parallel));
  }

  TEST_CASE("subset enumeration") {
    for (int d : {1, 2}) {
      DofProfile p{std::vector<int>(5, d), std::vector<AntennaPair>(5, {3, 3})};
      auto a = feasibility_necessary(p, Exec::serial);
      auto b = feasibility_necessary(p, Exec::parallel);
      CHECK(a.counting == b.counting);
      CHECK(a.violating_subset == b.violating_subset);
    }
  }
}
