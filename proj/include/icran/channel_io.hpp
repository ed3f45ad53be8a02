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

#include <json.hpp>

#include "icran/channels.hpp"

namespace icran {

// JSON layout:
//   {"kind": "scalar|parallel|miso|mimo", "K": int, "N": int (parallel),
//    "antennas": [[tx, rx], ...] (miso: [[Nt, 1], ...]; mimo),
//    "budgets": [...], "gains": [[re, im], ...]}
// Gains are flattened row-major over (tone, tx, rx, row, col) as applicable.
// Doubles are written in shortest round-trip form, so parse(dump(x)) is
// bit-exact.
nlohmann::json channel_to_json(const AnyChannel& ch);
AnyChannel channel_from_json(const nlohmann::json& doc);

std::string dump_channel(const AnyChannel& ch);
AnyChannel parse_channel(const std::string& text);

}  // namespace icran
