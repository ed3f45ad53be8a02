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

#include "icran/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace icran {

int worker_count() {
  int cap = 0;
  if (const char* env = std::getenv("ICRAN_THREADS")) {
    try {
      cap = std::stoi(env);
    } catch (const std::exception&) {
      cap = 0;
    }
  }
#ifdef _OPENMP
  const int available = omp_get_max_threads();
#else
  const int available = 1;
#endif
  if (cap <= 0 || cap > available) return available;
  return cap;
}

}  // namespace icran
