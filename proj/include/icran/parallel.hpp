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

namespace icran {

// Kernels with an OpenMP path keep a serial reference. Both produce
// bitwise-identical results; tests hold them to that.
enum class Exec { serial, parallel };

// Worker cap from ICRAN_THREADS (0 or unset = OpenMP default).
int worker_count();

}  // namespace icran
