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

// Windowed epsilon-greedy (WEG) controller.
//
// For every input the controller decides between exploring with the oracle and
// exploiting a cascade of a specialized model and the oracle. It cycles through
// three phases:
//
//   WindowInit         Label w_min inputs with the oracle. If the dominant
//                      classes of the new window are within tau_r of the
//                      previous epoch's, the old window is prepended and the
//                      epoch is treated as continuing.
//   TemplateSelection  Estimate the cascade accuracy of every template
//                      retargeted to the window's dominant classes. Retarget
//                      the cheapest template whose estimate reaches
//                      a* + tau_a, otherwise label one more input with the
//                      oracle and retry.
//   Specialized        Run the cascade. Non-cascaded outputs are checked
//                      against the oracle with probability epsilon. Exit back
//                      to WindowInit when the estimated accuracy falls below
//                      a* + tau_a or the checked mismatch ratio exceeds tau_fp.
//
// In streaming mode the inputs that arrive while a model is being retargeted
// are served by the oracle (reported as Phase::kTraining).

#ifndef SKEWSIM_WEG_HPP_
#define SKEWSIM_WEG_HPP_

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skewsim/cascade.hpp"
#include "skewsim/models.hpp"
#include "skewsim/random.hpp"
#include "skewsim/stream.hpp"

namespace skewsim {

enum class Phase {
  kWindowInit,
  kTemplateSelection,
  kSpecialized,
  kTraining,    // oracle serves inputs while a retargeted model trains
  kOracleOnly,  // baseline policy, never emitted by the controller
};

std::string_view to_string(Phase phase);

// Minimum support as a function of window length.
struct SupportRule {
  std::size_t below = 2;
  std::size_t at_or_above = 3;
  std::size_t boundary = 90;

  std::size_t operator()(std::size_t window) const {
    return window < boundary ? below : at_or_above;
  }
};

enum class VariantKind { kStandard, kFixedWindow, kVariableTrainingSkew, kSimpleExit };

struct Variant {
  VariantKind kind = VariantKind::kStandard;
  std::size_t fixed_window = 0;  // only for kFixedWindow

  bool operator==(const Variant&) const = default;
};

// Accepts "standard", "fixed-window=<w>", "variable-skew" and "simple-exit".
// Throws ConfigError on anything else.
Variant parse_variant(std::string_view text);
std::string to_string(const Variant& variant);

enum class RetargetMode { kStreaming, kBatch };

struct WegConfig {
  std::size_t w_min = 30;
  std::size_t tau_r = 2;
  double tau_a = 0.05;
  double tau_fp = 0.5;
  double epsilon = 0.01;
  SupportRule support;
  double training_skew = 0.6;
  std::size_t max_window = 300;
  Variant variant;
  // a_out multiplier for models retargeted under the variable-skew ablation.
  // A calibration knob, not a measured quantity.
  double variable_skew_a_out_factor = 0.6;
  RetargetMode retarget_mode = RetargetMode::kStreaming;

  // Throws ConfigError.
  void validate() const;
};

enum class ExitRule { kAccuracyOrMismatch, kSkewBelowEntry };

// Concrete behavior switches derived from the configured variant.
struct AblationModifiers {
  bool merge_windows = true;
  std::size_t init_window = 30;
  bool observed_training_skew = false;
  double a_out_factor = 1.0;
  ExitRule exit_rule = ExitRule::kAccuracyOrMismatch;
};

AblationModifiers apply_ablation(const WegConfig& config);

// Labels appearing at least `support` times in the window, sorted.
LabelSet dom_classes(std::span<const ClassLabel> window, std::size_t support);

std::size_t support_threshold(const WegConfig& config, std::size_t window);

// |a symmetric-difference b| for sorted sets.
std::size_t symmetric_difference_size(const LabelSet& a, const LabelSet& b);

struct WegState {
  Phase phase = Phase::kWindowInit;
  std::size_t epoch = 1;
  // S_j: oracle labels of the current epoch, capped at max_window.
  std::deque<ClassLabel> window;
  std::size_t init_samples = 0;  // labels gathered in the current WindowInit
  std::size_t w = 0;             // active window length

  // Window and dominant set that led to the previous specialization.
  std::vector<ClassLabel> prev_window;
  LabelSet prev_dom;

  std::optional<CascadedClassifier> active;
  // Profile parameters the controller believes the active model has.
  SpecializationParams believed_params;
  std::size_t n_c = 0;     // non-cascaded specialized steps
  std::size_t n_star = 0;  // epsilon checks that disagreed with the oracle
  std::size_t checks = 0;  // epsilon checks performed
  double entry_skew = 0.0;
  double skew_estimate = 0.0;
  // Skew evidence: 1 if the label is (believed) in D.
  std::deque<bool> evidence;
  std::size_t evidence_hits = 0;
  std::size_t evidence_capacity = 0;
  std::size_t training_remaining = 0;

  // n_star / (n_c * epsilon), 0 before any non-cascaded step.
  double mismatch_ratio(double epsilon) const;
};

struct StepResult {
  ClassLabel label = 0;
  double cost_ms = 0.0;
  Phase phase = Phase::kWindowInit;  // phase at decision time
  bool cascaded = false;
  bool explored = false;    // an epsilon check ran the oracle as well
  bool retargeted = false;  // cost includes R_T
};

struct SpecializationEvent {
  std::size_t step = 0;
  std::size_t dom_size = 0;
  std::size_t window_size = 0;
  std::string template_name;
  double skew = 0.0;
};

class WegController {
 public:
  // frame_interval converts retargeting seconds into oracle-served inputs in
  // streaming mode. Throws ConfigError on invalid arguments.
  WegController(WegConfig config, OracleProfile oracle,
                std::vector<CompactProfile> templates, double frame_interval);

  StepResult step(const StreamItem& item, Rng& rng);

  const WegState& state() const { return state_; }
  const WegConfig& config() const { return config_; }
  const std::vector<SpecializationEvent>& specializations() const { return events_; }

 private:
  ClassLabel consult_oracle(ClassLabel true_label, Rng& rng, StepResult& result);
  void append_to_window(ClassLabel label);
  void finish_window_init();
  bool try_specialize();
  void exploit(const StreamItem& item, Rng& rng, StepResult& result);
  void push_evidence(bool hit);
  bool should_exit() const;
  void exit_specialized();

  WegConfig config_;
  AblationModifiers mods_;
  OracleProfile oracle_;
  std::vector<CompactProfile> templates_;
  double frame_interval_;
  WegState state_;
  std::size_t steps_ = 0;
  std::vector<SpecializationEvent> events_;
};

}  // namespace skewsim

#endif  // SKEWSIM_WEG_HPP_
