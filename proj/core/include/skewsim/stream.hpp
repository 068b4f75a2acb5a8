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

// Piecewise-stationary label streams: synthetic generation and trace replay.

#ifndef SKEWSIM_STREAM_HPP_
#define SKEWSIM_STREAM_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace skewsim {

// Class identity in [0, N).
using ClassLabel = std::uint32_t;

// Sorted, duplicate-free set of labels.
using LabelSet = std::vector<ClassLabel>;

bool contains(const LabelSet& set, ClassLabel label);

// One stationary piece of a synthetic stream. With n_dominant == 0 the segment
// is uniform over all N labels and skew is ignored.
struct SegmentSpec {
  std::size_t n_dominant = 0;
  double skew = 0.0;
  std::size_t length = 0;
  // When empty the dominant set is sampled from the stream seed.
  std::optional<LabelSet> dominant_set;
};

struct StreamSpec {
  std::size_t num_classes = 0;
  std::vector<SegmentSpec> segments;
  std::uint64_t seed = 0;
  // Seconds between items. Only used to convert retargeting time into items.
  double frame_interval = 1.0 / 6.0;

  // Throws ConfigError.
  void validate() const;
};

struct StreamItem {
  std::size_t index = 0;
  ClassLabel true_label = 0;
  std::size_t segment_id = 0;

  bool operator==(const StreamItem&) const = default;
};

// Resolved description of one generated segment.
struct SegmentInfo {
  std::size_t begin = 0;
  std::size_t length = 0;
  double skew = 0.0;
  LabelSet dominant_set;
};

struct Stream {
  std::size_t num_classes = 0;
  std::vector<StreamItem> items;
  // Empty for replayed traces, whose epoch boundaries are unknown.
  std::vector<SegmentInfo> segments;
};

// Deterministic in spec (including seed). Throws ConfigError on an invalid spec.
Stream generate_stream(const StreamSpec& spec);

// Trace format: one `index,label` pair per line, `#` starts a comment, and an
// optional `#N=<int>` header declares the class universe. If neither the
// header nor `num_classes` declares N, it is inferred as max label + 1.
// Throws IoError if the file cannot be read and ParseError/ValidationError on
// bad content.
Stream load_trace(const std::filesystem::path& path,
                  std::optional<std::size_t> num_classes = std::nullopt);
Stream parse_trace(std::istream& in,
                   std::optional<std::size_t> num_classes = std::nullopt);

}  // namespace skewsim

#endif  // SKEWSIM_STREAM_HPP_
