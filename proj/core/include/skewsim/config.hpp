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

// JSON run configuration and parameter sweeps.
//
// A config has five sections; unknown keys anywhere are rejected.
//
//   {
//     "stream":    {"num_classes": 2622, "frame_interval": 0.1667,
//                   "segments": [{"n_dominant": 5, "skew": 0.9, "length": 1800}]}
//                  or {"num_classes": ..., "pattern": {"n_dominant": 5, "skew": 0.9,
//                      "segment_length": 60, "total_items": 1800}}
//                  or {"trace": "labels.txt", "num_classes": 10},
//     "oracle":    {"preset": "face"} or {"accuracy": 0.958, "cost_ms": 28.8},
//     "templates": ["F2-like", {"name": ..., "run_cost_ms": ..., "retarget_cost_s": ...,
//                               "params": [{"n": 5, "a_in": ..., "e_in_out": ..., "a_out": ...}]}],
//     "weg":       {"w_min": 30, "tau_r": 2, "tau_a": -0.05, "tau_fp": 0.5, "epsilon": 0.01,
//                   "support": {"below": 2, "at_or_above": 3, "boundary": 90},
//                   "training_skew": 0.5, "max_window": 300,
//                   "variable_skew_a_out_factor": 0.6},
//     "run":       {"policy": "weg", "seed": 1, "repetitions": 5, "mode": "streaming"}
//   }

#ifndef SKEWSIM_CONFIG_HPP_
#define SKEWSIM_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skewsim/harness.hpp"

namespace skewsim {

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
};

// Relative trace paths resolve against base_dir. Throws ConfigError.
RunConfig parse_run_config(std::string_view json_text,
                           const std::filesystem::path& base_dir = {},
                           const ConfigOverrides& overrides = {});

// Throws IoError if the file cannot be read.
RunConfig load_run_config(const std::filesystem::path& path,
                          const ConfigOverrides& overrides = {});

std::string read_text_file(const std::filesystem::path& path);

// Returns the config text with the numeric or string field at `dotted_path`
// (array elements by index, e.g. "stream.segments.0.length") replaced by
// `value`. Missing object keys are created, so defaults can be swept; a name
// the schema does not know fails later in parse_run_config. Throws ConfigError
// for an out-of-range index or a non-scalar target.
std::string set_config_value(std::string_view json_text, std::string_view dotted_path,
                             std::string_view value);

struct SweepPoint {
  std::string value;
  SimulationResult result;
};

// One full simulation per value. Every point reuses the same seeds, so
// differences between points are paired.
std::vector<SweepPoint> sweep(std::string_view base_json, const std::filesystem::path& base_dir,
                              std::string_view param_path, std::span<const std::string> values,
                              const ConfigOverrides& overrides = {});

// Columns: param, value, then the metrics columns.
void write_sweep_csv(std::ostream& out, std::string_view param_path,
                     std::span<const SweepPoint> points);

}  // namespace skewsim

#endif  // SKEWSIM_CONFIG_HPP_
