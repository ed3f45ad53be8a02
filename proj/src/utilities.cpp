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

#include "icran/utilities.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "icran/errors.hpp"

namespace icran {

UtilitySpec UtilitySpec::sum_rate(std::vector<double> weights) {
  return {UtilityKind::sum_rate, 0.0, std::move(weights)};
}

UtilitySpec UtilitySpec::alpha_fair(double alpha, std::vector<double> weights) {
  if (!(alpha >= 0.0)) throw ParameterError("alpha must be >= 0");
  return {UtilityKind::alpha_fair, alpha, std::move(weights)};
}

UtilitySpec UtilitySpec::parse(std::string_view text) {
  if (text == "sum") return {UtilityKind::sum_rate, 0.0, {}};
  if (text == "propfair") return {UtilityKind::proportional_fair, 1.0, {}};
  if (text == "harmonic") return {UtilityKind::harmonic, 2.0, {}};
  if (text == "minrate") return {UtilityKind::min_rate, 0.0, {}};
  if (text.starts_with("alpha:")) {
    const auto value = text.substr(6);
    double alpha = 0.0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), alpha);
    if (ec != std::errc() || end != value.data() + value.size())
      throw ParameterError("bad alpha value in '" + std::string(text) + "'");
    return alpha_fair(alpha);
  }
  throw ParameterError("unknown utility '" + std::string(text) +
                       "' (expected sum, propfair, harmonic, minrate or alpha:<a>)");
}

std::string UtilitySpec::to_string() const {
  switch (kind) {
    case UtilityKind::sum_rate: return "sum";
    case UtilityKind::proportional_fair: return "propfair";
    case UtilityKind::harmonic: return "harmonic";
    case UtilityKind::min_rate: return "minrate";
    case UtilityKind::alpha_fair: {
      char buf[64];
      const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), alpha);
      return "alpha:" + std::string(buf, end);
    }
  }
  return "unknown";
}

void UtilitySpec::validate(int users) const {
  if (kind == UtilityKind::alpha_fair && !(alpha >= 0.0)) throw ParameterError("alpha must be >= 0");
  if (weights.empty()) return;
  if (static_cast<int>(weights.size()) != users)
    throw DimensionError("utility weights must have one entry per user");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw ParameterError("utility weights must be > 0");
}

void validate(const QosTargets& targets, int users) {
  for (const auto* list : {&targets.sinr, &targets.rate}) {
    if (list->empty()) continue;
    if (static_cast<int>(list->size()) != users)
      throw DimensionError("QoS targets must have one entry per user");
    for (double t : *list)
      if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("QoS targets must be >= 0");
  }
}

namespace {

void require_positive(std::span<const double> rates, const char* what) {
  for (std::size_t k = 0; k < rates.size(); ++k)
    if (!(rates[k] > 0.0))
      throw DomainError(std::string(what) + " utility needs R_" + std::to_string(k) + " > 0",
                        static_cast<int>(k));
}

}  // namespace

double evaluate(const UtilitySpec& spec, std::span<const double> rates) {
  const int users = static_cast<int>(rates.size());
  spec.validate(users);
  for (std::size_t k = 0; k < rates.size(); ++k)
    if (!(rates[k] >= 0.0)) throw DomainError("rates must be >= 0", static_cast<int>(k));

  double acc = 0.0;
  switch (spec.kind) {
    case UtilityKind::sum_rate:
      for (int k = 0; k < users; ++k) acc += spec.weight(k) * rates[k];
      return acc;
    case UtilityKind::proportional_fair:
      require_positive(rates, "proportional-fair");
      for (int k = 0; k < users; ++k) acc += spec.weight(k) * std::log(rates[k]);
      return acc;
    case UtilityKind::harmonic:
      require_positive(rates, "harmonic");
      for (int k = 0; k < users; ++k) acc += 1.0 / rates[k];
      return 1.0 / acc;
    case UtilityKind::min_rate:
      return users == 0 ? 0.0 : *std::min_element(rates.begin(), rates.end());
    case UtilityKind::alpha_fair:
      if (spec.alpha == 1.0) {
        require_positive(rates, "alpha-fair (alpha = 1)");
        for (int k = 0; k < users; ++k) acc += spec.weight(k) * std::log(rates[k]);
        return acc;
      }
      if (spec.alpha > 1.0) require_positive(rates, "alpha-fair (alpha > 1)");
      for (int k = 0; k < users; ++k)
        acc += spec.weight(k) * std::pow(rates[k], 1.0 - spec.alpha) / (1.0 - spec.alpha);
      return acc;
  }
  return acc;
}

double evaluate(const UtilitySpec& spec, const Eigen::VectorXd& rates) {
  return evaluate(spec, std::span<const double>(rates.data(), static_cast<std::size_t>(rates.size())));
}

Eigen::VectorXd marginal_utility(const UtilitySpec& spec, const Eigen::VectorXd& rates) {
  const int users = static_cast<int>(rates.size());
  spec.validate(users);
  const std::span<const double> view(rates.data(), static_cast<std::size_t>(users));
  Eigen::VectorXd d(users);
  switch (spec.kind) {
    case UtilityKind::sum_rate:
      for (int k = 0; k < users; ++k) d(k) = spec.weight(k);
      return d;
    case UtilityKind::proportional_fair:
      require_positive(view, "proportional-fair");
      for (int k = 0; k < users; ++k) d(k) = spec.weight(k) / rates(k);
      return d;
    case UtilityKind::harmonic: {
      require_positive(view, "harmonic");
      const double s = rates.cwiseInverse().sum();
      for (int k = 0; k < users; ++k) d(k) = 1.0 / (s * s * rates(k) * rates(k));
      return d;
    }
    case UtilityKind::min_rate:
      throw NonSmoothError("min-rate utility is not differentiable");
    case UtilityKind::alpha_fair:
      if (spec.alpha > 0.0) require_positive(view, "alpha-fair");
      for (int k = 0; k < users; ++k)
        d(k) = spec.weight(k) * (spec.alpha == 0.0 ? 1.0 : std::pow(rates(k), -spec.alpha));
      return d;
  }
  return d;
}

Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x, std::optional<double> h) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h ? *h : 1e-5 * std::max(1.0, std::abs(x(i)));
    probe(i) = x(i) + step;
    const double up = f(probe);
    probe(i) = x(i) - step;
    const double down = f(probe);
    probe(i) = x(i);
    grad(i) = (up - down) / (2.0 * step);
  }
  return grad;
}

}  // namespace icran
