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

#include "icran/channel_io.hpp"

#include "icran/errors.hpp"

namespace icran {

namespace {

using nlohmann::json;

json complex_array(const std::vector<Complex>& values) {
  json out = json::array();
  for (const auto& z : values) out.push_back({z.real(), z.imag()});
  return out;
}

std::vector<Complex> read_complex_array(const json& arr, std::size_t expected) {
  if (!arr.is_array() || arr.size() != expected)
    throw ConfigError("gains: expected " + std::to_string(expected) + " [re, im] pairs");
  std::vector<Complex> out;
  out.reserve(expected);
  for (const auto& pair : arr) {
    if (!pair.is_array() || pair.size() != 2) throw ConfigError("gains entries must be [re, im]");
    out.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return out;
}

template <class Channel>
json header(const std::string& kind, const Channel& ch) {
  return json{{"kind", kind}, {"K", ch.users()}, {"budgets", ch.budgets()}};
}

}  // namespace

json channel_to_json(const AnyChannel& any) {
  return std::visit(
      [](const auto& ch) -> json {
        using T = std::decay_t<decltype(ch)>;
        if constexpr (std::is_same_v<T, ScalarChannel>) {
          json doc = header("scalar", ch);
          doc["gains"] = complex_array(ch.gains());
          return doc;
        } else if constexpr (std::is_same_v<T, ParallelChannel>) {
          json doc = header("parallel", ch);
          doc["N"] = ch.tones();
          doc["gains"] = complex_array(ch.gains());
          return doc;
        } else if constexpr (std::is_same_v<T, MisoChannel>) {
          json doc = header("miso", ch);
          json antennas = json::array();
          for (int k = 0; k < ch.users(); ++k) antennas.push_back({ch.tx_antennas(), 1});
          doc["antennas"] = antennas;
          std::vector<Complex> flat;
          for (const auto& h : ch.gains())
            for (Eigen::Index t = 0; t < h.size(); ++t) flat.push_back(h(t));
          doc["gains"] = complex_array(flat);
          return doc;
        } else {
          json doc = header("mimo", ch);
          json antennas = json::array();
          for (const auto& a : ch.antenna_profile()) antennas.push_back({a.tx, a.rx});
          doc["antennas"] = antennas;
          std::vector<Complex> flat;
          for (const auto& h : ch.gains())
            for (Eigen::Index r = 0; r < h.rows(); ++r)
              for (Eigen::Index c = 0; c < h.cols(); ++c) flat.push_back(h(r, c));
          doc["gains"] = complex_array(flat);
          return doc;
        }
      },
      any);
}

AnyChannel channel_from_json(const json& doc) {
  try {
    const auto kind = parse_channel_kind(doc.at("kind").get<std::string>());
    const int users = doc.at("K").get<int>();
    auto budgets = doc.at("budgets").get<std::vector<double>>();
    if (users < 1) throw DimensionError("K must be >= 1");
    const std::size_t kk = static_cast<std::size_t>(users) * users;
    switch (kind) {
      case ChannelKind::scalar:
        return ScalarChannel(users, read_complex_array(doc.at("gains"), kk), std::move(budgets));
      case ChannelKind::parallel: {
        const int tones = doc.at("N").get<int>();
        if (tones < 1) throw DimensionError("N must be >= 1");
        return ParallelChannel(users, tones, read_complex_array(doc.at("gains"), kk * tones),
                               std::move(budgets));
      }
      case ChannelKind::miso: {
        const auto antennas = doc.at("antennas");
        if (antennas.size() != static_cast<std::size_t>(users))
          throw DimensionError("antennas must list every user");
        const int nt = antennas.at(0).at(0).get<int>();
        if (nt < 1) throw DimensionError("Nt must be >= 1");
        const auto flat = read_complex_array(doc.at("gains"), kk * nt);
        std::vector<Eigen::RowVectorXcd> gains(kk, Eigen::RowVectorXcd(nt));
        for (std::size_t i = 0; i < kk; ++i)
          for (int t = 0; t < nt; ++t) gains[i](t) = flat[i * nt + t];
        return MisoChannel(users, nt, std::move(gains), std::move(budgets));
      }
      case ChannelKind::mimo: {
        std::vector<AntennaPair> antennas;
        for (const auto& a : doc.at("antennas")) antennas.push_back({a.at(0).get<int>(), a.at(1).get<int>()});
        if (antennas.size() != static_cast<std::size_t>(users))
          throw DimensionError("antennas must list every user");
        std::size_t total = 0;
        for (int l = 0; l < users; ++l) {
          if (antennas[l].tx < 1 || antennas[l].rx < 1) throw DimensionError("antenna counts must be >= 1");
          for (int k = 0; k < users; ++k)
            total += static_cast<std::size_t>(antennas[k].rx) * antennas[l].tx;
        }
        const auto flat = read_complex_array(doc.at("gains"), total);
        std::vector<Eigen::MatrixXcd> gains;
        std::size_t at = 0;
        for (int l = 0; l < users; ++l)
          for (int k = 0; k < users; ++k) {
            Eigen::MatrixXcd h(antennas[k].rx, antennas[l].tx);
            for (Eigen::Index r = 0; r < h.rows(); ++r)
              for (Eigen::Index c = 0; c < h.cols(); ++c) h(r, c) = flat[at++];
            gains.push_back(std::move(h));
          }
        return MimoChannel(std::move(antennas), std::move(gains), std::move(budgets));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed channel document: ") + e.what());
  }
  throw ConfigError("unknown channel kind");
}

std::string dump_channel(const AnyChannel& ch) { return channel_to_json(ch).dump(); }

AnyChannel parse_channel(const std::string& text) {
  try {
    return channel_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("channel document is not JSON: ") + e.what());
  }
}

}  // namespace icran
