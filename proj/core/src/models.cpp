// Copyright 2026 The skewsim Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "skewsim/models.hpp"

#include <stdexcept>
#include <utility>

#include "skewsim/errors.hpp"

namespace skewsim {
namespace {

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

SpecializationParams lerp(const SpecializationParams& lo, const SpecializationParams& hi,
                          double t) {
  return {lo.a_in + t * (hi.a_in - lo.a_in),
          lo.e_in_out + t * (hi.e_in_out - lo.e_in_out),
          lo.a_out + t * (hi.a_out - lo.a_out)};
}

// Costs: oracle and compact GPU latencies (ms), retargeting times (s).
// Tables are keyed by dominant-set size.
CompactProfile f2_like() {
  return {"F2-like", 1.93, 4.0,
          {{1, {0.97, 0.02, 0.90}},
           {5, {0.93, 0.05, 0.90}},
           {10, {0.90, 0.07, 0.88}},
           {15, {0.87, 0.09, 0.86}},
           {20, {0.84, 0.11, 0.84}}}};
}

CompactProfile o2_like() {
  return {"O2-like", 2.8, 14.0,
          {{1, {0.92, 0.05, 0.82}},
           {5, {0.85, 0.08, 0.80}},
           {10, {0.80, 0.10, 0.78}},
           {15, {0.75, 0.12, 0.75}},
           {20, {0.70, 0.14, 0.72}}}};
}

CompactProfile s2_like() {
  return {"S2-like", 2.44, 14.0,
          {{1, {0.88, 0.06, 0.78}},
           {5, {0.80, 0.10, 0.75}},
           {10, {0.72, 0.12, 0.72}},
           {15, {0.65, 0.14, 0.70}},
           {20, {0.60, 0.16, 0.68}}}};
}

}  // namespace

void OracleProfile::validate() const {
  if (!(accuracy > 0.0 && accuracy <= 1.0)) {
    throw ConfigError("oracle: accuracy must lie in (0, 1]");
  }
  if (!(cost_ms > 0.0)) throw ConfigError("oracle: cost_ms must be > 0");
  if (num_classes < 2) throw ConfigError("oracle: num_classes must be >= 2");
}

void SpecializationParams::validate() const {
  if (!is_probability(a_in) || !is_probability(e_in_out) || !is_probability(a_out)) {
    throw ConfigError("specialization params must lie in [0, 1]");
  }
  if (a_in + e_in_out > 1.0 + 1e-12) {
    throw ConfigError("specialization params: a_in + e_in_out exceeds 1");
  }
}

void CompactProfile::validate(const OracleProfile& oracle) const {
  const std::string where = "template '" + name + "': ";
  if (name.empty()) throw ConfigError("template: empty name");
  if (param_table.empty()) throw ConfigError(where + "empty param table");
  if (!(run_cost_ms > 0.0)) throw ConfigError(where + "run_cost_ms must be > 0");
  if (!(run_cost_ms < oracle.cost_ms)) {
    throw ConfigError(where + "run_cost_ms must be below the oracle cost");
  }
  if (!(retarget_cost_s >= 0.0)) throw ConfigError(where + "retarget_cost_s must be >= 0");
  for (const auto& [n, params] : param_table) {
    if (n == 0) throw ConfigError(where + "param table keys must be >= 1");
    params.validate();
  }
}

ClassLabel oracle_classify(const OracleProfile& oracle, ClassLabel true_label, Rng& rng) {
  if (uniform01(rng) < oracle.accuracy) return true_label;
  auto r = static_cast<ClassLabel>(uniform_index(rng, oracle.num_classes - 1));
  return r >= true_label ? r + 1 : r;
}

SpecializationParams interpolate_profile(const ParamTable& table, std::size_t n) {
  auto hi = table.lower_bound(n);
  if (hi == table.end()) return std::prev(hi)->second;
  if (hi->first == n || hi == table.begin()) return hi->second;
  auto lo = std::prev(hi);
  const double t = static_cast<double>(n - lo->first) /
                   static_cast<double>(hi->first - lo->first);
  return lerp(lo->second, hi->second, t);
}

SpecializedModel specialize(const CompactProfile& profile, LabelSet dominant_set,
                            double training_skew, double a_out_factor) {
  if (dominant_set.empty()) {
    throw std::logic_error("specialize: empty dominant set");
  }
  SpecializationParams params = interpolate_profile(profile.param_table, dominant_set.size());
  params.a_out *= a_out_factor;
  return {profile, std::move(dominant_set), params, training_skew};
}

std::optional<ClassLabel> specialized_classify(const SpecializedModel& model,
                                               ClassLabel true_label, Rng& rng) {
  const LabelSet& dom = model.dominant_set;
  const SpecializationParams& p = model.params;
  const double u = uniform01(rng);
  if (model.in_context(true_label)) {
    if (u < p.a_in) return true_label;
    if (u < p.a_in + p.e_in_out) return std::nullopt;
    // Wrong in-context label, uniform over D \ {true_label}.
    if (dom.size() == 1) return std::nullopt;
    auto r = uniform_index(rng, dom.size() - 1);
    const auto self = static_cast<std::size_t>(
        std::lower_bound(dom.begin(), dom.end(), true_label) - dom.begin());
    return dom[r >= self ? r + 1 : r];
  }
  if (u < p.a_out) return std::nullopt;
  return dom[uniform_index(rng, dom.size())];
}

std::optional<TaskPreset> builtin_task(std::string_view task) {
  if (task == "face") return TaskPreset{"face", {0.958, 28.8, 2622}, f2_like(), -0.05, 0.5};
  if (task == "object") return TaskPreset{"object", {0.689, 11.0, 1000}, o2_like(), 0.05, 0.6};
  if (task == "scene") return TaskPreset{"scene", {0.581, 28.8, 205}, s2_like(), 0.05, 0.7};
  return std::nullopt;
}

std::optional<CompactProfile> builtin_template(std::string_view name) {
  if (name == "F2-like") return f2_like();
  if (name == "O2-like") return o2_like();
  if (name == "S2-like") return s2_like();
  return std::nullopt;
}

}  // namespace skewsim
