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

#include "skewsim/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "skewsim/cascade.hpp"
#include "skewsim/errors.hpp"
#include "skewsim/random.hpp"

namespace skewsim {
namespace {

constexpr std::uint64_t kStreamStream = 0;
constexpr std::uint64_t kControllerStream = 1;

double frame_interval_of(const StreamSource& source) {
  return std::visit([](const auto& s) { return s.frame_interval; }, source);
}

std::size_t num_classes_of(const StreamSource& source) {
  if (const auto* spec = std::get_if<StreamSpec>(&source)) return spec->num_classes;
  return std::get<TraceSource>(source).num_classes.value_or(0);
}

StepRecord to_record(const StreamItem& item, const StepResult& r, std::size_t t) {
  return {t,          item.true_label, r.label,      r.label == item.true_label, r.phase,
          r.cascaded, r.explored,      r.retargeted, r.cost_ms};
}

const char* json_bool(bool b) { return b ? "true" : "false"; }

// Neumaier-compensated running sum; keeps long cost totals exact enough that
// a constant-cost run averages back to its per-item cost.
class CostSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

Policy parse_policy(std::string_view text) {
  if (text == "oracle") return {PolicyKind::kOracleOnly, {}};
  return {PolicyKind::kWeg, parse_variant(text)};
}

std::string to_string(const Policy& policy) {
  if (policy.kind == PolicyKind::kOracleOnly) return "oracle";
  return to_string(policy.variant);
}

void RunConfig::validate() const {
  if (repetitions < 1) throw ConfigError("run: repetitions must be >= 1");
  if (const auto* spec = std::get_if<StreamSpec>(&stream)) {
    spec->validate();
  } else {
    const auto& trace = std::get<TraceSource>(stream);
    if (!(trace.frame_interval > 0.0)) throw ConfigError("stream: frame_interval must be > 0");
  }
  oracle.validate();
  const std::size_t n = num_classes_of(stream);
  if (n != 0 && n != oracle.num_classes) {
    throw ConfigError("oracle: num_classes differs from the stream's");
  }
  for (const auto& t : templates) t.validate(oracle);
  weg.validate();
  if (policy.kind == PolicyKind::kWeg && templates.empty()) {
    throw ConfigError("templates: at least one template required for policy weg");
  }
}

Stream make_stream(const RunConfig& config, std::size_t repetition) {
  if (const auto* spec = std::get_if<StreamSpec>(&config.stream)) {
    StreamSpec seeded = *spec;
    seeded.seed = derive_seed(config.seed, {repetition, kStreamStream});
    return generate_stream(seeded);
  }
  const auto& trace = std::get<TraceSource>(config.stream);
  return load_trace(trace.path, trace.num_classes);
}

RepetitionResult run_repetition(const RunConfig& config, std::size_t repetition) {
  const Stream stream = make_stream(config, repetition);
  OracleProfile oracle = config.oracle;
  if (stream.num_classes > oracle.num_classes) {
    throw ValidationError("stream labels exceed the oracle's class universe");
  }
  Rng rng(derive_seed(config.seed, {repetition, kControllerStream}));

  RepetitionResult out;
  out.repetition = repetition;
  out.log.reserve(stream.items.size());
  if (config.policy.kind == PolicyKind::kOracleOnly) {
    for (std::size_t t = 0; t < stream.items.size(); ++t) {
      const StreamItem& item = stream.items[t];
      StepResult r;
      r.phase = Phase::kOracleOnly;
      r.label = oracle_classify(oracle, item.true_label, rng);
      r.cost_ms = oracle.cost_ms;
      out.log.push_back(to_record(item, r, t));
    }
  } else {
    WegConfig weg = config.weg;
    weg.variant = config.policy.variant;
    WegController controller(weg, oracle, config.templates, frame_interval_of(config.stream));
    for (std::size_t t = 0; t < stream.items.size(); ++t) {
      const StreamItem& item = stream.items[t];
      out.log.push_back(to_record(item, controller.step(item, rng), t));
    }
    out.specializations = controller.specializations();
  }

  std::optional<double> regret;
  const auto comparators = best_per_epoch_costs(stream, oracle, config.templates);
  if (!comparators.empty()) regret = compute_regret(out.log, comparators);
  out.metrics = compute_metrics(out.log, out.specializations, oracle.cost_ms, regret);
  return out;
}

SimulationResult run_simulation(const RunConfig& config) {
  config.validate();
  SimulationResult result;
  result.run_id = config.config_hash;
  result.policy = to_string(config.policy);
  result.seed = config.seed;
  for (std::size_t r = 0; r < config.repetitions; ++r) {
    result.repetitions.push_back(run_repetition(config, r));
  }
  result.mean = average_metrics(result.repetitions);
  return result;
}

std::vector<EpochComparator> best_per_epoch_costs(const Stream& stream,
                                                  const OracleProfile& oracle,
                                                  std::span<const CompactProfile> templates) {
  std::vector<EpochComparator> out;
  for (const SegmentInfo& seg : stream.segments) {
    EpochComparator cmp{seg.begin, seg.length, oracle.cost_ms, "oracle"};
    const std::size_t n = seg.dominant_set.size();
    if (n > 0) {
      for (const CompactProfile& t : templates) {
        const SpecializationParams params = interpolate_profile(t.param_table, n);
        const double cost =
            expected_cascade_cost(seg.skew, params, n, t.run_cost_ms, oracle.cost_ms);
        if (cost < cmp.per_item_cost_ms) {
          cmp.per_item_cost_ms = cost;
          cmp.best = t.name;
        }
      }
    }
    out.push_back(std::move(cmp));
  }
  return out;
}

double compute_regret(std::span<const StepRecord> log,
                      std::span<const EpochComparator> comparators) {
  std::size_t covered = 0;
  double comparator_total = 0.0;
  for (const EpochComparator& c : comparators) {
    covered += c.length;
    comparator_total += static_cast<double>(c.length) * c.per_item_cost_ms;
  }
  if (covered != log.size()) {
    throw std::invalid_argument("compute_regret: comparators do not cover the log");
  }
  CostSum actual;
  for (const StepRecord& s : log) actual.add(s.cost_ms);
  return actual.value() - comparator_total;
}

RunMetrics compute_metrics(std::span<const StepRecord> log,
                           std::span<const SpecializationEvent> specializations,
                           double oracle_cost_ms, std::optional<double> regret_ms) {
  RunMetrics m;
  m.items = log.size();
  m.oracle_only_cost_ms = oracle_cost_ms;
  m.regret_ms = regret_ms;
  std::size_t correct = 0;
  std::size_t special = 0;
  std::size_t cascaded = 0;
  std::size_t retargets = 0;
  CostSum total_cost;
  for (const StepRecord& s : log) {
    correct += s.correct ? 1 : 0;
    total_cost.add(s.cost_ms);
    retargets += s.retargeted ? 1 : 0;
    if (s.phase == Phase::kSpecialized) {
      ++special;
      cascaded += s.cascaded ? 1 : 0;
    }
  }
  if (m.items > 0) {
    const auto n = static_cast<double>(m.items);
    m.accuracy = static_cast<double>(correct) / n;
    m.mean_cost_ms = total_cost.value() / n;
    m.special_rate = static_cast<double>(special) / n;
    m.speedup = m.mean_cost_ms > 0.0 ? oracle_cost_ms / m.mean_cost_ms : 0.0;
  }
  if (special > 0) m.cascade_rate = static_cast<double>(cascaded) / static_cast<double>(special);
  m.retargets = static_cast<double>(retargets);
  if (!specializations.empty()) {
    double dom = 0.0;
    double win = 0.0;
    for (const auto& e : specializations) {
      dom += static_cast<double>(e.dom_size);
      win += static_cast<double>(e.window_size);
    }
    m.mean_dom_size = dom / static_cast<double>(specializations.size());
    m.mean_window_size = win / static_cast<double>(specializations.size());
  }
  return m;
}

RunMetrics average_metrics(std::span<const RepetitionResult> repetitions) {
  RunMetrics m;
  if (repetitions.empty()) return m;
  const auto k = static_cast<double>(repetitions.size());
  auto mean_of = [&](auto field) {
    CostSum sum;
    for (const auto& r : repetitions) sum.add(static_cast<double>(field(r.metrics)));
    return sum.value() / k;
  };
  m.items = static_cast<std::size_t>(mean_of([](const RunMetrics& x) { return x.items; }) + 0.5);
  m.accuracy = mean_of([](const RunMetrics& x) { return x.accuracy; });
  m.mean_cost_ms = mean_of([](const RunMetrics& x) { return x.mean_cost_ms; });
  m.oracle_only_cost_ms = mean_of([](const RunMetrics& x) { return x.oracle_only_cost_ms; });
  m.speedup = mean_of([](const RunMetrics& x) { return x.speedup; });
  m.special_rate = mean_of([](const RunMetrics& x) { return x.special_rate; });
  m.cascade_rate = mean_of([](const RunMetrics& x) { return x.cascade_rate; });
  m.retargets = mean_of([](const RunMetrics& x) { return x.retargets; });
  m.mean_dom_size = mean_of([](const RunMetrics& x) { return x.mean_dom_size; });
  m.mean_window_size = mean_of([](const RunMetrics& x) { return x.mean_window_size; });
  const bool all_regret = std::all_of(repetitions.begin(), repetitions.end(),
                                      [](const auto& r) { return r.metrics.regret_ms.has_value(); });
  if (all_regret) m.regret_ms = mean_of([](const RunMetrics& x) { return *x.regret_ms; });
  return m;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

const std::vector<std::string_view> kMetricsColumns = {
    "run_id",       "policy",      "seed",         "repetition",      "items",
    "accuracy",     "mean_cost_ms", "oracle_only_cost_ms", "speedup", "special_rate",
    "cascade_rate", "retargets",   "mean_dom_size", "mean_window_size", "regret_ms"};

void write_metrics_rows(std::ostream& out, const SimulationResult& result,
                        std::string_view prefix) {
  auto row = [&](std::string_view rep, const RunMetrics& m) {
    out << prefix << result.run_id << ',' << result.policy << ',' << result.seed << ','
        << rep << ',' << m.items << ',' << format_double(m.accuracy) << ','
        << format_double(m.mean_cost_ms) << ',' << format_double(m.oracle_only_cost_ms) << ','
        << format_double(m.speedup) << ',' << format_double(m.special_rate) << ','
        << format_double(m.cascade_rate) << ',' << format_double(m.retargets) << ','
        << format_double(m.mean_dom_size) << ',' << format_double(m.mean_window_size) << ','
        << (m.regret_ms ? format_double(*m.regret_ms) : std::string("NA")) << '\n';
  };
  for (const auto& r : result.repetitions) row(std::to_string(r.repetition), r.metrics);
  row("mean", result.mean);
}

void write_metrics_csv(std::ostream& out, const SimulationResult& result) {
  for (std::size_t i = 0; i < kMetricsColumns.size(); ++i) {
    out << (i ? "," : "") << kMetricsColumns[i];
  }
  out << '\n';
  write_metrics_rows(out, result);
}

void write_step_log(std::ostream& out, const SimulationResult& result) {
  for (const auto& rep : result.repetitions) {
    for (const StepRecord& s : rep.log) {
      out << "{\"rep\":" << rep.repetition << ",\"t\":" << s.t
          << ",\"true_label\":" << s.true_label << ",\"predicted\":" << s.predicted
          << ",\"correct\":" << json_bool(s.correct) << ",\"phase\":\"" << to_string(s.phase)
          << "\",\"cascaded\":" << json_bool(s.cascaded)
          << ",\"explored\":" << json_bool(s.explored)
          << ",\"retargeted\":" << json_bool(s.retargeted)
          << ",\"cost_ms\":" << format_double(s.cost_ms) << "}\n";
    }
  }
}

}  // namespace skewsim
