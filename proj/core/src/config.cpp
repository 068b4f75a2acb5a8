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

#include "skewsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "skewsim/errors.hpp"

namespace skewsim {
namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  require_object(j, where);
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

double as_double(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError(where + ": expected a number");
}

std::uint64_t as_uint(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigError(where + ": expected a non-negative integer");
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

template <typename Fn>
void with_key(const json& j, const char* key, const std::string& where, Fn&& fn) {
  if (auto it = j.find(key); it != j.end()) fn(*it, where + "." + key);
}

double get_double(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + ": missing '" + key + "'");
  return as_double(*it, where + "." + key);
}

std::uint64_t get_uint(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + ": missing '" + key + "'");
  return as_uint(*it, where + "." + key);
}

SegmentSpec parse_segment(const json& j, const std::string& where) {
  check_keys(j, where, {"n_dominant", "skew", "length", "dominant_set"});
  SegmentSpec seg;
  with_key(j, "n_dominant", where,
           [&](const json& v, const std::string& w) { seg.n_dominant = as_uint(v, w); });
  seg.length = get_uint(j, "length", where);
  with_key(j, "skew", where, [&](const json& v, const std::string& w) { seg.skew = as_double(v, w); });
  if (seg.n_dominant > 0 && !j.contains("skew")) throw ConfigError(where + ": missing 'skew'");
  with_key(j, "dominant_set", where, [&](const json& v, const std::string& w) {
    if (!v.is_array()) throw ConfigError(w + ": expected an array");
    LabelSet set;
    for (const auto& x : v) set.push_back(static_cast<ClassLabel>(as_uint(x, w)));
    seg.dominant_set = std::move(set);
  });
  return seg;
}

StreamSource parse_stream(const json& j, const std::filesystem::path& base_dir) {
  const std::string where = "stream";
  require_object(j, where);
  if (j.contains("trace")) {
    check_keys(j, where, {"trace", "num_classes", "frame_interval"});
    TraceSource trace;
    std::filesystem::path p = as_string(j["trace"], "stream.trace");
    trace.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    with_key(j, "num_classes", where,
             [&](const json& v, const std::string& w) { trace.num_classes = as_uint(v, w); });
    with_key(j, "frame_interval", where,
             [&](const json& v, const std::string& w) { trace.frame_interval = as_double(v, w); });
    return trace;
  }
  check_keys(j, where, {"num_classes", "frame_interval", "segments", "pattern"});
  StreamSpec spec;
  spec.num_classes = get_uint(j, "num_classes", where);
  with_key(j, "frame_interval", where,
           [&](const json& v, const std::string& w) { spec.frame_interval = as_double(v, w); });
  if (j.contains("segments") == j.contains("pattern")) {
    throw ConfigError("stream: exactly one of 'segments' or 'pattern' is required");
  }
  if (auto it = j.find("segments"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("stream.segments: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      spec.segments.push_back(parse_segment((*it)[i], "stream.segments." + std::to_string(i)));
    }
  } else {
    const json& pat = j["pattern"];
    const std::string pw = "stream.pattern";
    check_keys(pat, pw, {"n_dominant", "skew", "segment_length", "total_items"});
    const std::size_t n = get_uint(pat, "n_dominant", pw);
    const double skew = n > 0 ? get_double(pat, "skew", pw) : 0.0;
    const std::size_t len = get_uint(pat, "segment_length", pw);
    const std::size_t total = get_uint(pat, "total_items", pw);
    if (len == 0 || total == 0) throw ConfigError(pw + ": lengths must be > 0");
    for (std::size_t done = 0; done < total; done += len) {
      spec.segments.push_back({n, skew, std::min(len, total - done), std::nullopt});
    }
  }
  return spec;
}

OracleProfile parse_oracle(const json& j, std::optional<std::size_t> stream_classes) {
  const std::string where = "oracle";
  check_keys(j, where, {"preset", "accuracy", "cost_ms", "num_classes"});
  OracleProfile oracle;
  std::optional<std::size_t> classes;
  bool has_preset = false;
  with_key(j, "preset", where, [&](const json& v, const std::string& w) {
    auto preset = builtin_task(as_string(v, w));
    if (!preset) throw ConfigError(w + ": unknown preset '" + v.get<std::string>() + "'");
    oracle = preset->oracle;
    has_preset = true;
  });
  if (!has_preset && (!j.contains("accuracy") || !j.contains("cost_ms"))) {
    throw ConfigError("oracle: 'accuracy' and 'cost_ms' are required without a preset");
  }
  with_key(j, "accuracy", where, [&](const json& v, const std::string& w) { oracle.accuracy = as_double(v, w); });
  with_key(j, "cost_ms", where, [&](const json& v, const std::string& w) { oracle.cost_ms = as_double(v, w); });
  with_key(j, "num_classes", where, [&](const json& v, const std::string& w) { classes = as_uint(v, w); });
  if (classes) {
    oracle.num_classes = *classes;
  } else if (stream_classes) {
    oracle.num_classes = *stream_classes;
  } else if (!has_preset) {
    throw ConfigError("oracle: num_classes unknown; set it on the stream or the oracle");
  }
  return oracle;
}

CompactProfile parse_template(const json& j, const std::string& where) {
  if (j.is_string()) {
    auto t = builtin_template(j.get<std::string>());
    if (!t) throw ConfigError(where + ": unknown template '" + j.get<std::string>() + "'");
    return *t;
  }
  check_keys(j, where, {"preset", "name", "run_cost_ms", "retarget_cost_s", "params"});
  CompactProfile t;
  with_key(j, "preset", where, [&](const json& v, const std::string& w) {
    auto base = builtin_template(as_string(v, w));
    if (!base) throw ConfigError(w + ": unknown template '" + v.get<std::string>() + "'");
    t = *base;
  });
  with_key(j, "name", where, [&](const json& v, const std::string& w) { t.name = as_string(v, w); });
  with_key(j, "run_cost_ms", where, [&](const json& v, const std::string& w) { t.run_cost_ms = as_double(v, w); });
  with_key(j, "retarget_cost_s", where, [&](const json& v, const std::string& w) { t.retarget_cost_s = as_double(v, w); });
  with_key(j, "params", where, [&](const json& v, const std::string& w) {
    if (!v.is_array()) throw ConfigError(w + ": expected an array");
    t.param_table.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string ew = w + "." + std::to_string(i);
      check_keys(v[i], ew, {"n", "a_in", "e_in_out", "a_out"});
      const std::size_t n = get_uint(v[i], "n", ew);
      if (t.param_table.contains(n)) throw ConfigError(ew + ": duplicate n");
      t.param_table[n] = {get_double(v[i], "a_in", ew), get_double(v[i], "e_in_out", ew),
                          get_double(v[i], "a_out", ew)};
    }
  });
  return t;
}

WegConfig parse_weg(const json& j) {
  const std::string where = "weg";
  check_keys(j, where, {"w_min", "tau_r", "tau_a", "tau_fp", "epsilon", "support",
                        "training_skew", "max_window", "variable_skew_a_out_factor"});
  WegConfig c;
  with_key(j, "w_min", where, [&](const json& v, const std::string& w) { c.w_min = as_uint(v, w); });
  with_key(j, "tau_r", where, [&](const json& v, const std::string& w) { c.tau_r = as_uint(v, w); });
  with_key(j, "tau_a", where, [&](const json& v, const std::string& w) { c.tau_a = as_double(v, w); });
  with_key(j, "tau_fp", where, [&](const json& v, const std::string& w) { c.tau_fp = as_double(v, w); });
  with_key(j, "epsilon", where, [&](const json& v, const std::string& w) { c.epsilon = as_double(v, w); });
  with_key(j, "training_skew", where, [&](const json& v, const std::string& w) { c.training_skew = as_double(v, w); });
  with_key(j, "max_window", where, [&](const json& v, const std::string& w) { c.max_window = as_uint(v, w); });
  with_key(j, "variable_skew_a_out_factor", where, [&](const json& v, const std::string& w) {
    c.variable_skew_a_out_factor = as_double(v, w);
  });
  with_key(j, "support", where, [&](const json& v, const std::string& w) {
    check_keys(v, w, {"below", "at_or_above", "boundary"});
    with_key(v, "below", w, [&](const json& x, const std::string& xw) { c.support.below = as_uint(x, xw); });
    with_key(v, "at_or_above", w, [&](const json& x, const std::string& xw) { c.support.at_or_above = as_uint(x, xw); });
    with_key(v, "boundary", w, [&](const json& x, const std::string& xw) { c.support.boundary = as_uint(x, xw); });
  });
  return c;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
}

void apply_overrides(json& doc, const ConfigOverrides& overrides) {
  if (!overrides.seed && !overrides.policy) return;
  if (!doc.contains("run")) doc["run"] = json::object();
  require_object(doc["run"], "run");
  if (overrides.seed) doc["run"]["seed"] = *overrides.seed;
  if (overrides.policy) doc["run"]["policy"] = *overrides.policy;
}

std::string hash_config(json doc) {
  if (auto it = doc.find("run"); it != doc.end() && it->is_object()) it->erase("seed");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_document(const json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc, "config", {"stream", "oracle", "templates", "weg", "run"});
  for (const char* key : {"stream", "oracle"}) {
    if (!doc.contains(key)) throw ConfigError(std::string("config: missing section '") + key + "'");
  }
  RunConfig config;
  try {
    config.stream = parse_stream(doc["stream"], base_dir);
    std::optional<std::size_t> classes;
    if (const auto* spec = std::get_if<StreamSpec>(&config.stream)) {
      classes = spec->num_classes;
    } else {
      classes = std::get<TraceSource>(config.stream).num_classes;
    }
    config.oracle = parse_oracle(doc["oracle"], classes);
    if (auto* trace = std::get_if<TraceSource>(&config.stream); trace && !trace->num_classes) {
      trace->num_classes = config.oracle.num_classes;
    }
    if (auto it = doc.find("templates"); it != doc.end()) {
      if (!it->is_array()) throw ConfigError("templates: expected an array");
      for (std::size_t i = 0; i < it->size(); ++i) {
        config.templates.push_back(parse_template((*it)[i], "templates." + std::to_string(i)));
      }
    }
    if (auto it = doc.find("weg"); it != doc.end()) config.weg = parse_weg(*it);
    if (auto it = doc.find("run"); it != doc.end()) {
      const std::string where = "run";
      check_keys(*it, where, {"policy", "seed", "repetitions", "mode"});
      with_key(*it, "policy", where, [&](const json& v, const std::string& w) {
        config.policy = parse_policy(as_string(v, w));
      });
      with_key(*it, "seed", where, [&](const json& v, const std::string& w) { config.seed = as_uint(v, w); });
      with_key(*it, "repetitions", where, [&](const json& v, const std::string& w) {
        config.repetitions = as_uint(v, w);
      });
      with_key(*it, "mode", where, [&](const json& v, const std::string& w) {
        const std::string mode = as_string(v, w);
        if (mode == "streaming") {
          config.weg.retarget_mode = RetargetMode::kStreaming;
        } else if (mode == "batch") {
          config.weg.retarget_mode = RetargetMode::kBatch;
        } else {
          throw ConfigError(w + ": expected 'streaming' or 'batch'");
        }
      });
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  config.config_hash = hash_config(doc);
  config.validate();
  return config;
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir,
                           const ConfigOverrides& overrides) {
  json doc = parse_json(json_text);
  require_object(doc, "config");
  apply_overrides(doc, overrides);
  return parse_document(doc, base_dir);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path.string() + "'");
  return ss.str();
}

RunConfig load_run_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  return parse_run_config(read_text_file(path), path.parent_path(), overrides);
}

std::string set_config_value(std::string_view json_text, std::string_view dotted_path,
                             std::string_view value) {
  json doc = parse_json(json_text);
  const std::string path_str(dotted_path);
  const std::string v(value);
  auto unknown = [&] { return ConfigError("unknown parameter path '" + path_str + "'"); };
  json* node = &doc;
  std::string_view rest = dotted_path;
  while (!rest.empty()) {
    const auto dot = rest.find('.');
    const std::string part(rest.substr(0, dot));
    rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
    if (part.empty()) throw unknown();
    if (node->is_array()) {
      std::size_t index = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), index);
      if (ec != std::errc() || ptr != part.data() + part.size() || index >= node->size()) {
        throw unknown();
      }
      node = &(*node)[index];
    } else if (node->is_object()) {
      // Absent keys are created here; parsing rejects names that do not exist.
      if (!node->contains(part)) (*node)[part] = rest.empty() ? json() : json::object();
      node = &(*node)[part];
    } else {
      throw unknown();
    }
  }

  std::uint64_t as_int = 0;
  const auto [iptr, iec] = std::from_chars(v.data(), v.data() + v.size(), as_int);
  const bool is_int = iec == std::errc() && iptr == v.data() + v.size();
  double as_real = 0.0;
  const auto [dptr, dec] = std::from_chars(v.data(), v.data() + v.size(), as_real);
  const bool is_real = dec == std::errc() && dptr == v.data() + v.size();

  if (node->is_null()) {
    if (is_int) {
      *node = as_int;
    } else if (is_real) {
      *node = as_real;
    } else {
      *node = v;
    }
  } else if (node->is_number_integer() || node->is_number_unsigned()) {
    if (!is_int) {
      throw ConfigError("parameter '" + path_str + "' expects an integer, got '" + v + "'");
    }
    *node = as_int;
  } else if (node->is_number_float()) {
    if (!is_real) {
      throw ConfigError("parameter '" + path_str + "' expects a number, got '" + v + "'");
    }
    *node = as_real;
  } else if (node->is_string()) {
    *node = v;
  } else {
    throw ConfigError("parameter '" + path_str + "' is not a numeric or enum field");
  }
  return doc.dump();
}

std::vector<SweepPoint> sweep(std::string_view base_json, const std::filesystem::path& base_dir,
                              std::string_view param_path, std::span<const std::string> values,
                              const ConfigOverrides& overrides) {
  json doc = parse_json(base_json);
  require_object(doc, "config");
  apply_overrides(doc, overrides);
  const std::string base = doc.dump();
  std::vector<SweepPoint> points;
  for (const std::string& value : values) {
    const RunConfig config =
        parse_run_config(set_config_value(base, param_path, value), base_dir);
    points.push_back({value, run_simulation(config)});
  }
  return points;
}

void write_sweep_csv(std::ostream& out, std::string_view param_path,
                     std::span<const SweepPoint> points) {
  out << "param,value";
  for (std::string_view col : kMetricsColumns) out << ',' << col;
  out << '\n';
  for (const SweepPoint& p : points) {
    const std::string prefix = std::string(param_path) + "," + p.value + ",";
    write_metrics_rows(out, p.result, prefix);
  }
}

}  // namespace skewsim
