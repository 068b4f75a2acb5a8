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

#include "skewsim/stream.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>

#include "skewsim/errors.hpp"
#include "skewsim/random.hpp"

namespace skewsim {
namespace {

// Floyd's algorithm: k distinct labels from [0, n), returned sorted.
LabelSet sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  LabelSet chosen;
  chosen.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    auto t = static_cast<ClassLabel>(uniform_index(rng, j + 1));
    auto it = std::lower_bound(chosen.begin(), chosen.end(), t);
    if (it != chosen.end() && *it == t) {
      auto jt = static_cast<ClassLabel>(j);
      chosen.insert(std::lower_bound(chosen.begin(), chosen.end(), jt), jt);
    } else {
      chosen.insert(it, t);
    }
  }
  return chosen;
}

// The r-th label (0-based) of [0, N) that is not in `excluded`.
ClassLabel nth_outside(const LabelSet& excluded, std::uint64_t r) {
  auto label = static_cast<ClassLabel>(r);
  for (ClassLabel d : excluded) {
    if (d <= label) {
      ++label;
    } else {
      break;
    }
  }
  return label;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

bool contains(const LabelSet& set, ClassLabel label) {
  return std::binary_search(set.begin(), set.end(), label);
}

void StreamSpec::validate() const {
  if (num_classes < 2) throw ConfigError("stream: num_classes must be >= 2");
  if (segments.empty()) throw ConfigError("stream: at least one segment required");
  if (!(frame_interval > 0.0)) throw ConfigError("stream: frame_interval must be > 0");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const SegmentSpec& seg = segments[i];
    const std::string where = "stream: segment " + std::to_string(i) + ": ";
    if (seg.length == 0) throw ConfigError(where + "length must be > 0");
    if (seg.n_dominant > num_classes) {
      throw ConfigError(where + "n_dominant exceeds num_classes");
    }
    if (seg.n_dominant > 0 && !(seg.skew >= 0.0 && seg.skew <= 1.0)) {
      throw ConfigError(where + "skew must lie in [0, 1]");
    }
    if (seg.n_dominant == num_classes && seg.skew < 1.0) {
      throw ConfigError(where + "no non-dominant labels left for skew < 1");
    }
    if (seg.dominant_set) {
      LabelSet sorted = *seg.dominant_set;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ConfigError(where + "dominant_set has duplicates");
      }
      if (sorted.size() != seg.n_dominant) {
        throw ConfigError(where + "dominant_set size differs from n_dominant");
      }
      if (!sorted.empty() && sorted.back() >= num_classes) {
        throw ConfigError(where + "dominant_set label out of range");
      }
    }
  }
}

Stream generate_stream(const StreamSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Stream out;
  out.num_classes = spec.num_classes;
  std::size_t total = 0;
  for (const auto& seg : spec.segments) total += seg.length;
  out.items.reserve(total);

  std::size_t index = 0;
  for (std::size_t s = 0; s < spec.segments.size(); ++s) {
    const SegmentSpec& seg = spec.segments[s];
    SegmentInfo info;
    info.begin = index;
    info.length = seg.length;
    info.skew = seg.n_dominant == 0 ? 0.0 : seg.skew;
    if (seg.dominant_set) {
      info.dominant_set = *seg.dominant_set;
      std::sort(info.dominant_set.begin(), info.dominant_set.end());
    } else if (seg.n_dominant > 0) {
      info.dominant_set = sample_without_replacement(spec.num_classes, seg.n_dominant, rng);
    }

    const LabelSet& dom = info.dominant_set;
    const std::uint64_t n_dom = dom.size();
    const std::uint64_t n_rest = spec.num_classes - n_dom;
    for (std::size_t i = 0; i < seg.length; ++i) {
      ClassLabel label;
      if (n_dom == 0) {
        label = static_cast<ClassLabel>(uniform_index(rng, spec.num_classes));
      } else if (uniform01(rng) < info.skew) {
        label = dom[uniform_index(rng, n_dom)];
      } else {
        label = nth_outside(dom, uniform_index(rng, n_rest));
      }
      out.items.push_back({index++, label, s});
    }
    out.segments.push_back(std::move(info));
  }
  return out;
}

Stream parse_trace(std::istream& in, std::optional<std::size_t> num_classes) {
  struct Row {
    std::size_t line;
    std::size_t index;
    ClassLabel label;
  };
  std::vector<Row> rows;
  std::optional<std::size_t> header_n;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      std::string_view body = trim(text.substr(1));
      if (body.starts_with("N=")) {
        std::size_t n = 0;
        if (!parse_number(body.substr(2), n) || n < 2) {
          throw ParseError(line_no, "malformed #N= header");
        }
        header_n = n;
      }
      continue;
    }
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) {
      throw ParseError(line_no, "expected 'index,label'");
    }
    Row row{line_no, 0, 0};
    if (!parse_number(text.substr(0, comma), row.index)) {
      throw ParseError(line_no, "bad index '" + std::string(text.substr(0, comma)) + "'");
    }
    if (!parse_number(text.substr(comma + 1), row.label)) {
      throw ParseError(line_no, "bad label '" + std::string(text.substr(comma + 1)) + "'");
    }
    rows.push_back(row);
  }
  if (num_classes && header_n && *num_classes != *header_n) {
    throw ValidationError("trace declares N=" + std::to_string(*header_n) +
                          " but " + std::to_string(*num_classes) + " was expected");
  }

  Stream out;
  std::optional<std::size_t> declared = num_classes ? num_classes : header_n;
  std::size_t max_label = 0;
  out.items.reserve(rows.size());
  for (const Row& r : rows) {
    if (declared && r.label >= *declared) {
      throw ValidationError("line " + std::to_string(r.line) + ": label " +
                            std::to_string(r.label) + " >= N=" +
                            std::to_string(*declared));
    }
    max_label = std::max<std::size_t>(max_label, r.label);
    out.items.push_back({r.index, r.label, 0});
  }
  out.num_classes = declared ? *declared : std::max<std::size_t>(2, max_label + 1);
  return out;
}

Stream load_trace(const std::filesystem::path& path,
                  std::optional<std::size_t> num_classes) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace '" + path.string() + "'");
  return parse_trace(in, num_classes);
}

}  // namespace skewsim
