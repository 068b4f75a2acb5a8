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

// Simulation driver, metrics and regret accounting.
//
// Costs are modelled latency in milliseconds, never wall-clock time.

#ifndef SKEWSIM_HARNESS_HPP_
#define SKEWSIM_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "skewsim/models.hpp"
#include "skewsim/stream.hpp"
#include "skewsim/weg.hpp"

namespace skewsim {

enum class PolicyKind { kWeg, kOracleOnly };

struct Policy {
  PolicyKind kind = PolicyKind::kWeg;
  Variant variant;  // only meaningful for kWeg
};

// "weg", "oracle", "fixed-window=<w>", "variable-skew" or "simple-exit".
Policy parse_policy(std::string_view text);
std::string to_string(const Policy& policy);

struct TraceSource {
  std::filesystem::path path;
  std::optional<std::size_t> num_classes;
  double frame_interval = 1.0 / 6.0;
};

using StreamSource = std::variant<StreamSpec, TraceSource>;

struct RunConfig {
  StreamSource stream;
  OracleProfile oracle;
  std::vector<CompactProfile> templates;
  WegConfig weg;
  Policy policy;
  std::uint64_t seed = 0;
  std::size_t repetitions = 1;
  // Identifies the configuration apart from its seed.
  std::string config_hash;

  // Throws ConfigError.
  void validate() const;
};

struct StepRecord {
  std::size_t t = 0;
  ClassLabel true_label = 0;
  ClassLabel predicted = 0;
  bool correct = false;
  Phase phase = Phase::kOracleOnly;
  bool cascaded = false;
  bool explored = false;
  bool retargeted = false;
  double cost_ms = 0.0;
};

struct RunMetrics {
  std::size_t items = 0;
  double accuracy = 0.0;
  double mean_cost_ms = 0.0;
  double oracle_only_cost_ms = 0.0;
  double speedup = 0.0;
  double special_rate = 0.0;   // items handled by an active cascade
  double cascade_rate = 0.0;   // of those, fraction sent on to the oracle
  double retargets = 0.0;
  double mean_dom_size = 0.0;
  double mean_window_size = 0.0;
  std::optional<double> regret_ms;  // unavailable for trace replay
};

struct RepetitionResult {
  std::size_t repetition = 0;
  RunMetrics metrics;
  std::vector<StepRecord> log;
  std::vector<SpecializationEvent> specializations;
};

struct SimulationResult {
  std::string run_id;
  std::string policy;
  std::uint64_t seed = 0;
  std::vector<RepetitionResult> repetitions;
  RunMetrics mean;
};

// Runs every repetition of `config`. Repetition r draws its stream and its
// controller randomness from seeds derived from (config.seed, r), so results
// are reproducible and independent of execution order.
SimulationResult run_simulation(const RunConfig& config);
RepetitionResult run_repetition(const RunConfig& config, std::size_t repetition);

// Materializes the stream of one repetition.
Stream make_stream(const RunConfig& config, std::size_t repetition);

// Cheapest classifier for one epoch: the oracle, or a template perfectly
// retargeted to the epoch's true dominant set, by closed-form expected cost.
struct EpochComparator {
  std::size_t begin = 0;
  std::size_t length = 0;
  double per_item_cost_ms = 0.0;
  std::string best;  // "oracle" or template name
};

// Empty when the stream carries no segment information.
std::vector<EpochComparator> best_per_epoch_costs(const Stream& stream,
                                                  const OracleProfile& oracle,
                                                  std::span<const CompactProfile> templates);

// Sum of actual per-step cost minus the comparator cost of every epoch.
// Throws std::invalid_argument if the comparators do not cover the log.
double compute_regret(std::span<const StepRecord> log,
                      std::span<const EpochComparator> comparators);

RunMetrics compute_metrics(std::span<const StepRecord> log,
                           std::span<const SpecializationEvent> specializations,
                           double oracle_cost_ms, std::optional<double> regret_ms);

// Mean of each column; regret only if every repetition has one.
RunMetrics average_metrics(std::span<const RepetitionResult> repetitions);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

extern const std::vector<std::string_view> kMetricsColumns;

// Header plus one row per repetition and a trailing "mean" row.
void write_metrics_csv(std::ostream& out, const SimulationResult& result);
void write_metrics_rows(std::ostream& out, const SimulationResult& result,
                        std::string_view prefix = {});

// One JSON object per step: rep, t, true_label, predicted, correct, phase,
// cascaded, explored, retargeted, cost_ms.
void write_step_log(std::ostream& out, const SimulationResult& result);

}  // namespace skewsim

#endif  // SKEWSIM_HARNESS_HPP_
