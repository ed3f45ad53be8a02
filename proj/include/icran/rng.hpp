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
#include <random>

#include "icran/types.hpp"

namespace icran {

// Seeded source of CN(0,1) samples that reproduces across compilers and
// standard libraries: std::mt19937_64 is fully specified, and the uniform
// and normal transforms below are written out instead of using the
// implementation-defined std::*_distribution classes.
//
//   uniform: (x >> 11) * 2^-53, shifted to (0, 1]
//   normal:  Box-Muller, both outputs consumed in order
//   complex: (n1 + i n2) / sqrt(2)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal();

  Complex complex_gaussian();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace icran
