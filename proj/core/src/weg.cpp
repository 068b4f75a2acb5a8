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

#include "skewsim/weg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <utility>

#include "skewsim/errors.hpp"

namespace skewsim {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kWindowInit: return "window_init";
    case Phase::kTemplateSelection: return "template_selection";
    case Phase::kSpecialized: return "specialized";
    case Phase::kTraining: return "training";
    case Phase::kOracleOnly: return "oracle_only";
  }
  return "unknown";
}

Variant parse_variant(std::string_view text) {
  if (text == "standard" || text == "weg") return {};
  if (text == "variable-skew") return {VariantKind::kVariableTrainingSkew, 0};
  if (text == "simple-exit") return {VariantKind::kSimpleExit, 0};
  constexpr std::string_view kFixed = "fixed-window=";
  if (text.starts_with(kFixed)) {
    std::string_view num = text.substr(kFixed.size());
    std::size_t w = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), w);
    if (ec == std::errc() && ptr == num.data() + num.size() && w > 0) {
      return {VariantKind::kFixedWindow, w};
    }
  }
  throw ConfigError("unknown variant '" + std::string(text) + "'");
}

std::string to_string(const Variant& variant) {
  switch (variant.kind) {
    case VariantKind::kStandard: return "weg";
    case VariantKind::kFixedWindow:
      return "fixed-window=" + std::to_string(variant.fixed_window);
    case VariantKind::kVariableTrainingSkew: return "variable-skew";
    case VariantKind::kSimpleExit: return "simple-exit";
  }
  return "unknown";
}

void WegConfig::validate() const {
  if (w_min < 1) throw ConfigError("weg: w_min must be >= 1");
  if (max_window < w_min) throw ConfigError("weg: max_window must be >= w_min");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("weg: epsilon must lie in (0, 1)");
  if (!(tau_fp >= 0.0)) throw ConfigError("weg: tau_fp must be >= 0");
  if (std::isnan(tau_a)) throw ConfigError("weg: tau_a is NaN");
  if (support.below < 1 || support.at_or_above < 1) {
    throw ConfigError("weg: support counts must be >= 1");
  }
  if (!(training_skew >= 0.0 && training_skew <= 1.0)) {
    throw ConfigError("weg: training_skew must lie in [0, 1]");
  }
  if (!(variable_skew_a_out_factor >= 0.0 && variable_skew_a_out_factor <= 1.0)) {
    throw ConfigError("weg: variable_skew_a_out_factor must lie in [0, 1]");
  }
  if (variant.kind == VariantKind::kFixedWindow &&
      (variant.fixed_window < 1 || variant.fixed_window > max_window)) {
    throw ConfigError("weg: fixed window must lie in [1, max_window]");
  }
}

AblationModifiers apply_ablation(const WegConfig& config) {
  AblationModifiers mods;
  mods.init_window = config.w_min;
  switch (config.variant.kind) {
    case VariantKind::kStandard:
      break;
    case VariantKind::kFixedWindow:
      mods.merge_windows = false;
      mods.init_window = config.variant.fixed_window;
      break;
    case VariantKind::kVariableTrainingSkew:
      mods.observed_training_skew = true;
      mods.a_out_factor = config.variable_skew_a_out_factor;
      break;
    case VariantKind::kSimpleExit:
      mods.exit_rule = ExitRule::kSkewBelowEntry;
      break;
  }
  return mods;
}

LabelSet dom_classes(std::span<const ClassLabel> window, std::size_t support) {
  std::unordered_map<ClassLabel, std::size_t> counts;
  for (ClassLabel y : window) ++counts[y];
  LabelSet dom;
  for (const auto& [label, count] : counts) {
    if (count >= support) dom.push_back(label);
  }
  std::sort(dom.begin(), dom.end());
  return dom;
}

std::size_t support_threshold(const WegConfig& config, std::size_t window) {
  return config.support(window);
}

std::size_t symmetric_difference_size(const LabelSet& a, const LabelSet& b) {
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return a.size() + b.size() - 2 * common;
}

double WegState::mismatch_ratio(double epsilon) const {
  if (n_c == 0) return 0.0;
  return static_cast<double>(n_star) / (static_cast<double>(n_c) * epsilon);
}

WegController::WegController(WegConfig config, OracleProfile oracle,
                             std::vector<CompactProfile> templates, double frame_interval)
    : config_(std::move(config)),
      mods_(apply_ablation(config_)),
      oracle_(oracle),
      templates_(std::move(templates)),
      frame_interval_(frame_interval) {
  config_.validate();
  oracle_.validate();
  if (templates_.empty()) throw ConfigError("weg: at least one template required");
  for (const auto& t : templates_) t.validate(oracle_);
  if (!(frame_interval_ > 0.0)) throw ConfigError("weg: frame_interval must be > 0");
}

StepResult WegController::step(const StreamItem& item, Rng& rng) {
  StepResult result;
  result.phase = state_.phase;
  switch (state_.phase) {
    case Phase::kWindowInit:
      append_to_window(consult_oracle(item.true_label, rng, result));
      if (++state_.init_samples >= mods_.init_window) {
        finish_window_init();
        result.retargeted = try_specialize();
      }
      break;
    case Phase::kTemplateSelection:
      append_to_window(consult_oracle(item.true_label, rng, result));
      result.retargeted = try_specialize();
      break;
    case Phase::kSpecialized:
      if (state_.training_remaining > 0) {
        result.phase = Phase::kTraining;
        consult_oracle(item.true_label, rng, result);
        --state_.training_remaining;
      } else {
        exploit(item, rng, result);
      }
      break;
    case Phase::kTraining:
    case Phase::kOracleOnly:
      break;
  }
  if (result.retargeted) {
    result.cost_ms += state_.active->specialized.profile.retarget_cost_s * 1000.0;
  }
  ++steps_;
  return result;
}

ClassLabel WegController::consult_oracle(ClassLabel true_label, Rng& rng,
                                         StepResult& result) {
  result.label = oracle_classify(oracle_, true_label, rng);
  result.cost_ms += oracle_.cost_ms;
  return result.label;
}

void WegController::append_to_window(ClassLabel label) {
  state_.window.push_back(label);
  while (state_.window.size() > config_.max_window) state_.window.pop_front();
}

void WegController::finish_window_init() {
  if (mods_.merge_windows) {
    const std::vector<ClassLabel> fresh(state_.window.begin(), state_.window.end());
    const LabelSet dom = dom_classes(fresh, support_threshold(config_, fresh.size()));
    if (symmetric_difference_size(state_.prev_dom, dom) <= config_.tau_r) {
      // The previous epoch continues: S_j <- S_{j-1} + S_j.
      state_.window.insert(state_.window.begin(), state_.prev_window.begin(),
                           state_.prev_window.end());
      while (state_.window.size() > config_.max_window) state_.window.pop_front();
    }
  }
  state_.w = state_.window.size();
  state_.phase = Phase::kTemplateSelection;
}

bool WegController::try_specialize() {
  const std::size_t w = std::min(state_.w, state_.window.size());
  const std::vector<ClassLabel> recent(state_.window.end() - static_cast<std::ptrdiff_t>(w),
                                       state_.window.end());
  LabelSet dom = dom_classes(recent, support_threshold(config_, w));
  if (dom.empty()) return false;

  std::size_t hits = 0;
  for (ClassLabel y : recent) hits += contains(dom, y) ? 1 : 0;
  const double skew = static_cast<double>(hits) / static_cast<double>(w);

  // Among templates passing the accuracy test pick the lowest expected cost,
  // R_h + (1 - p_stay) R*, where p_stay = p(a_in) + p(1 - a_in - e_in_out).
  const double target = oracle_.accuracy + config_.tau_a;
  const CompactProfile* best = nullptr;
  SpecializationParams best_params;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const CompactProfile& t : templates_) {
    const SpecializationParams params = interpolate_profile(t.param_table, dom.size());
    if (estimate_accuracy(skew, params, oracle_.accuracy) < target) continue;
    const double p_stay = skew * params.a_in + skew * (1.0 - params.a_in - params.e_in_out);
    const double cost = t.run_cost_ms + (1.0 - p_stay) * oracle_.cost_ms;
    if (cost < best_cost) {
      best = &t;
      best_params = params;
      best_cost = cost;
    }
  }
  if (best == nullptr) return false;

  const double training_skew = mods_.observed_training_skew ? skew : config_.training_skew;
  state_.active = CascadedClassifier{
      specialize(*best, dom, training_skew, mods_.a_out_factor), oracle_};
  state_.believed_params = best_params;
  state_.phase = Phase::kSpecialized;
  state_.n_c = 0;
  state_.n_star = 0;
  state_.checks = 0;
  state_.entry_skew = skew;
  state_.skew_estimate = skew;

  // The skew evidence starts from the oracle labels that justified D.
  state_.evidence.clear();
  state_.evidence_hits = 0;
  state_.evidence_capacity = std::max(config_.w_min, w);
  for (ClassLabel y : recent) push_evidence(contains(dom, y));

  state_.training_remaining = 0;
  if (config_.retarget_mode == RetargetMode::kStreaming) {
    const double items = best->retarget_cost_s / frame_interval_;
    state_.training_remaining = static_cast<std::size_t>(std::ceil(items - 1e-9));
  }

  events_.push_back({steps_, dom.size(), w, best->name, skew});
  state_.prev_window = recent;
  state_.prev_dom = std::move(dom);
  return true;
}

void WegController::exploit(const StreamItem& item, Rng& rng, StepResult& result) {
  const CascadedClassifier& cc = *state_.active;
  const CascadeOutcome outcome = cascaded_classify(cc, item.true_label, rng);
  result.label = outcome.label;
  result.cascaded = outcome.cascaded;
  result.cost_ms = outcome.cost_ms;
  push_evidence(!outcome.cascaded);

  if (!outcome.cascaded) {
    // The epsilon draw only happens for non-cascaded outputs.
    if (uniform01(rng) < config_.epsilon) {
      result.explored = true;
      const ClassLabel check = oracle_classify(oracle_, item.true_label, rng);
      result.cost_ms += oracle_.cost_ms;
      ++state_.checks;
      if (check != outcome.label) ++state_.n_star;
      push_evidence(cc.specialized.in_context(check));
    }
    ++state_.n_c;
  }
  state_.skew_estimate = static_cast<double>(state_.evidence_hits) /
                         static_cast<double>(state_.evidence.size());
  if (should_exit()) exit_specialized();
}

void WegController::push_evidence(bool hit) {
  state_.evidence.push_back(hit);
  state_.evidence_hits += hit ? 1 : 0;
  while (state_.evidence.size() > state_.evidence_capacity) {
    state_.evidence_hits -= state_.evidence.front() ? 1 : 0;
    state_.evidence.pop_front();
  }
}

bool WegController::should_exit() const {
  if (mods_.exit_rule == ExitRule::kSkewBelowEntry) {
    return state_.skew_estimate < state_.entry_skew;
  }
  const double estimate =
      estimate_accuracy(state_.skew_estimate, state_.believed_params, oracle_.accuracy);
  return estimate < oracle_.accuracy + config_.tau_a ||
         state_.mismatch_ratio(config_.epsilon) > config_.tau_fp;
}

void WegController::exit_specialized() {
  state_.phase = Phase::kWindowInit;
  ++state_.epoch;
  state_.window.clear();
  state_.init_samples = 0;
  state_.active.reset();
  state_.evidence.clear();
  state_.evidence_hits = 0;
}

}  // namespace skewsim
