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

// Stochastic stand-ins for the oracle classifier and for compact models
// retargeted to a dominant set. Nothing here runs a network; each classifier
// is a distribution over outputs given the true label.

#ifndef SKEWSIM_MODELS_HPP_
#define SKEWSIM_MODELS_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skewsim/random.hpp"
#include "skewsim/stream.hpp"

namespace skewsim {

struct OracleProfile {
  double accuracy = 1.0;  // a*
  double cost_ms = 1.0;   // R*
  std::size_t num_classes = 2;

  void validate() const;
};

// Behavior of a specialized model on a stream:
//   a_in      P(correct label | input in D)
//   e_in_out  P("other"       | input in D)
//   a_out     P("other"       | input not in D)
// The remaining in-D mass 1 - a_in - e_in_out is a wrong label from D.
struct SpecializationParams {
  double a_in = 0.0;
  double e_in_out = 0.0;
  double a_out = 0.0;

  void validate() const;
  bool operator==(const SpecializationParams&) const = default;
};

// Keyed by dominant-set size n.
using ParamTable = std::map<std::size_t, SpecializationParams>;

// A compact template architecture that can be retargeted to any dominant set.
struct CompactProfile {
  std::string name;
  double run_cost_ms = 0.0;      // R_h
  double retarget_cost_s = 0.0;  // R_T
  ParamTable param_table;

  // Requires run_cost_ms < oracle.cost_ms. Throws ConfigError.
  void validate(const OracleProfile& oracle) const;
};

struct SpecializedModel {
  CompactProfile profile;
  LabelSet dominant_set;
  SpecializationParams params;
  double training_skew = 0.0;

  bool in_context(ClassLabel label) const { return contains(dominant_set, label); }
};

// h*: the true label with probability a*, otherwise uniform over the other N-1.
ClassLabel oracle_classify(const OracleProfile& oracle, ClassLabel true_label, Rng& rng);

// Componentwise linear interpolation between bracketing keys, clamped to the
// end entries outside the key range. The table must be non-empty.
SpecializationParams interpolate_profile(const ParamTable& table, std::size_t n);

// Retargets `profile` to `dominant_set`. `a_out_factor` scales a_out and is 1
// except under the variable-training-skew ablation. Throws std::logic_error on
// an empty dominant set.
SpecializedModel specialize(const CompactProfile& profile, LabelSet dominant_set,
                            double training_skew, double a_out_factor = 1.0);

// Returns the predicted in-context label, or nullopt for "other".
std::optional<ClassLabel> specialized_classify(const SpecializedModel& model,
                                               ClassLabel true_label, Rng& rng);

// Built-in task presets with costs from published oracle/compact model
// latencies. The parameter tables are plausible defaults, not measurements.
struct TaskPreset {
  std::string task;
  OracleProfile oracle;
  CompactProfile compact;
  double tau_a = 0.05;
  double training_skew = 0.6;
};

// "face", "object" or "scene".
std::optional<TaskPreset> builtin_task(std::string_view task);
// "F2-like", "O2-like" or "S2-like".
std::optional<CompactProfile> builtin_template(std::string_view name);

}  // namespace skewsim

#endif  // SKEWSIM_MODELS_HPP_
