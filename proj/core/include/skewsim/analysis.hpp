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

// Closed-form model of dominant-class detection in an oracle-labelled window,
// and skew measurement over label traces.
//
// The oracle is assumed correct with probability a* and otherwise uniform over
// the other N-1 labels. Inputs come from n dominant classes with total mass p
// (uniform within the set) and N-n non-dominant classes with mass 1-p.

#ifndef SKEWSIM_ANALYSIS_HPP_
#define SKEWSIM_ANALYSIS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "skewsim/stream.hpp"

namespace skewsim {

struct RegimeSpec {
  std::size_t num_classes = 2;
  double oracle_accuracy = 1.0;
  std::size_t n_dominant = 0;
  double skew = 0.0;  // ignored when n_dominant == 0
  std::size_t window = 1;
  std::size_t support = 1;

  // Throws ConfigError.
  void validate() const;
};

// Probability that the oracle outputs one given dominant class. n >= 1.
// Throws std::domain_error for n == 0 or n > N.
double prob_dominant_class(std::size_t num_classes, double a_star, std::size_t n, double p);

// Probability that the oracle outputs one given non-dominant class. n < N.
// With n == 0 the skew is ignored and the result is 1/N.
double prob_nondominant_class(std::size_t num_classes, double a_star, std::size_t n, double p);

// P[Binomial(w, q) >= c], summed in log space over whichever tail is smaller.
double detection_probability(double q, std::size_t window, std::size_t support);

struct WindowSupportRow {
  RegimeSpec regime;
  std::optional<double> p_in;  // absent for uniform (n == 0) regimes
  double p_out = 0.0;
};

std::vector<WindowSupportRow> window_support_table(std::span<const RegimeSpec> regimes);

// The eight regimes of the published window-support table.
std::vector<RegimeSpec> builtin_regimes();

struct SupportRecommendation {
  std::size_t support = 1;
  std::optional<double> p_in;
  double p_out = 0.0;
  // True when even support == window misses the target (q_out == 1).
  bool target_unreachable = false;
};

// Smallest support c >= 1 with p_out <= target_p_out. `regime.support` is
// ignored. Throws ConfigError unless 0 < target_p_out <= 1.
SupportRecommendation recommend_support(const RegimeSpec& regime, double target_p_out);

// Smallest number of most frequent labels whose count exceeds skew_percent% of
// the segment (strictly). `counts` need not be sorted.
std::size_t minimal_cover(std::vector<std::size_t> counts, double skew_percent);

struct SkewCurve {
  double skew_percent = 0.0;
  // fraction[k] = fraction of segments whose minimal cover is <= k + 1.
  std::vector<double> fraction;
};

struct SkewCdf {
  std::size_t segment_length = 0;
  std::size_t segments = 0;
  std::vector<SkewCurve> curves;
};

// Splits the trace into consecutive segments of `segment_length` items (a
// trailing partial segment is dropped) and builds one cumulative curve per
// skew. Throws ConfigError on an empty trace or zero segment length.
SkewCdf skew_cdf(std::span<const StreamItem> trace, std::size_t segment_length,
                 std::span<const double> skews_percent);

}  // namespace skewsim

#endif  // SKEWSIM_ANALYSIS_HPP_
