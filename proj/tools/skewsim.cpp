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


// skewsim: simulate, analyze and sweep sequential model specialization.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skewsim/analysis.hpp"
#include "skewsim/config.hpp"
#include "skewsim/errors.hpp"
#include "skewsim/harness.hpp"
#include "skewsim/stream.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

// Three significant figures; values below 1e-2 as e.g. "6.52E-5".
std::string sig3(double v) {
  char buf[32];
  if (v != 0.0 && std::fabs(v) < 1e-2) {
    std::snprintf(buf, sizeof(buf), "%.2E", v);
    std::string s(buf);
    const auto e = s.find('E');
    std::string mant = s.substr(0, e);
    std::string exp = s.substr(e + 1);
    const bool neg = exp[0] == '-';
    exp = exp.substr(1);
    while (exp.size() > 1 && exp[0] == '0') exp.erase(0, 1);
    return mant + "E" + (neg ? "-" : "") + exp;
  }
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// Writes to `path`, or stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw skewsim::IoError("cannot open '" + path + "' for writing");
  fn(out);
  out.flush();
  if (!out) throw skewsim::IoError("write to '" + path + "' failed");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) parts.push_back(cur);
  }
  return parts;
}

double to_number(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw skewsim::ConfigError(what + ": '" + s + "' is not a number");
}

std::size_t to_count(const std::string& s, const std::string& what) {
  const double v = to_number(s, what);
  if (v < 0 || v != std::floor(v)) {
    throw skewsim::ConfigError(what + ": '" + s + "' is not a count");
  }
  return static_cast<std::size_t>(v);
}

// Header row naming at least N,a,n,p,w,c; an index column is ignored.
std::vector<skewsim::RegimeSpec> read_regimes(const std::string& path) {
  std::istringstream in(skewsim::read_text_file(path));
  std::string line;
  std::vector<std::string> header;
  std::vector<skewsim::RegimeSpec> regimes;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      for (const char* col : {"N", "a", "n", "p", "w", "c"}) {
        if (std::find(header.begin(), header.end(), col) == header.end()) {
          throw skewsim::ParseError(line_no, std::string("missing column '") + col + "'");
        }
      }
      continue;
    }
    if (cells.size() != header.size()) {
      throw skewsim::ParseError(line_no, "expected " + std::to_string(header.size()) + " cells");
    }
    skewsim::RegimeSpec r;
    const std::string where = path + ":" + std::to_string(line_no);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string& h = header[i];
      if (h == "N") r.num_classes = to_count(cells[i], where);
      if (h == "a") r.oracle_accuracy = to_number(cells[i], where);
      if (h == "n") r.n_dominant = to_count(cells[i], where);
      if (h == "p") r.skew = cells[i] == "N/A" ? 0.0 : to_number(cells[i], where);
      if (h == "w") r.window = to_count(cells[i], where);
      if (h == "c") r.support = to_count(cells[i], where);
    }
    r.validate();
    regimes.push_back(r);
  }
  return regimes;
}

void write_window_support(std::ostream& out, const std::vector<skewsim::WindowSupportRow>& rows) {
  out << "index,N,a,n,p,w,c,p_in,p_out\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i].regime;
    out << i + 1 << ',' << r.num_classes << ',' << skewsim::format_double(r.oracle_accuracy) << ','
        << r.n_dominant << ',' << (r.n_dominant > 0 ? skewsim::format_double(r.skew) : "N/A")
        << ',' << r.window << ',' << r.support << ','
        << (rows[i].p_in ? sig3(*rows[i].p_in) : "N/A") << ',' << sig3(rows[i].p_out) << '\n';
  }
}

void write_skew_cdf(std::ostream& out, const skewsim::SkewCdf& cdf) {
  out << "skew_percent,n,fraction\n";
  for (const auto& curve : cdf.curves) {
    for (std::size_t k = 0; k < curve.fraction.size(); ++k) {
      out << skewsim::format_double(curve.skew_percent) << ',' << k + 1 << ','
          << skewsim::format_double(curve.fraction[k]) << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential model specialization simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::string out_path;
  std::string log_path;
  auto* simulate = app.add_subcommand("simulate", "Run a configured simulation");
  simulate->add_option("--config", config_path, "JSON run configuration")->required();
  simulate->add_option("--seed", seed, "Override run.seed");
  simulate->add_option("--policy", policy,
                       "weg, oracle, fixed-window=<w>, variable-skew or simple-exit");
  simulate->add_option("--out", out_path, "Metrics CSV (default stdout)");
  simulate->add_option("--log", log_path, "Per-step JSONL log");

  auto* analyze = app.add_subcommand("analyze", "Closed-form and trace analyses");
  analyze->require_subcommand(1);
  std::string regimes_path;
  auto* window_support =
      analyze->add_subcommand("window-support", "Dominant-class detection probabilities");
  window_support->add_option("--regimes", regimes_path, "CSV with columns N,a,n,p,w,c");
  window_support->add_option("--out", out_path, "Output CSV (default stdout)");

  std::string trace_path;
  std::size_t segment_items = 0;
  std::string skews_text = "60,70,80,90";
  auto* skew = analyze->add_subcommand("skew", "Skew CDF of a label trace");
  skew->add_option("--trace", trace_path, "Label trace")->required();
  skew->add_option("--segment-items", segment_items, "Items per segment")->required();
  skew->add_option("--skews", skews_text, "Comma-separated percentages");
  skew->add_option("--out", out_path, "Output CSV (default stdout)");

  std::string param;
  std::string values_text;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one simulation per parameter value");
  sweep_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  sweep_cmd->add_option("--param", param, "Dotted parameter path")->required();
  sweep_cmd->add_option("--values", values_text, "Comma-separated values")->required();
  sweep_cmd->add_option("--seed", seed, "Override run.seed");
  sweep_cmd->add_option("--policy", policy, "Override run.policy");
  sweep_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*simulate) {
      const skewsim::RunConfig config = skewsim::load_run_config(config_path, {seed, policy});
      const skewsim::SimulationResult result = skewsim::run_simulation(config);
      emit(out_path, [&](std::ostream& os) { skewsim::write_metrics_csv(os, result); });
      if (!log_path.empty()) {
        emit(log_path, [&](std::ostream& os) { skewsim::write_step_log(os, result); });
      }
    } else if (*window_support) {
      const auto regimes =
          regimes_path.empty() ? skewsim::builtin_regimes() : read_regimes(regimes_path);
      const auto rows = skewsim::window_support_table(regimes);
      emit(out_path, [&](std::ostream& os) { write_window_support(os, rows); });
    } else if (*skew) {
      std::vector<double> skews;
      for (const auto& s : split(skews_text, ',')) skews.push_back(to_number(s, "--skews"));
      const skewsim::Stream trace = skewsim::load_trace(trace_path, std::nullopt);
      const auto cdf = skewsim::skew_cdf(trace.items, segment_items, skews);
      emit(out_path, [&](std::ostream& os) { write_skew_cdf(os, cdf); });
    } else if (*sweep_cmd) {
      const std::vector<std::string> values = split(values_text, ',');
      if (values.empty()) throw skewsim::ConfigError("--values: no values given");
      const std::filesystem::path path(config_path);
      const auto points = skewsim::sweep(skewsim::read_text_file(path), path.parent_path(), param,
                                         values, {seed, policy});
      emit(out_path, [&](std::ostream& os) { skewsim::write_sweep_csv(os, param, points); });
    }
  } catch (const skewsim::IoError& e) {
    std::cerr << "skewsim: " << e.what() << '\n';
    return kExitIo;
  } catch (const skewsim::ConfigError& e) {
    std::cerr << "skewsim: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
