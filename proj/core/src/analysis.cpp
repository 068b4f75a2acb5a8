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

#include "skewsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>

#include "skewsim/errors.hpp"

namespace skewsim {
namespace {

double log_binomial_pmf(std::size_t w, std::size_t k, double log_q, double log_1mq) {
  const double n = static_cast<double>(w);
  const double kk = static_cast<double>(k);
  return std::lgamma(n + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(n - kk + 1.0) +
         kk * log_q + (n - kk) * log_1mq;
}

// Sums exp(terms) relative to the largest term.
double log_sum_exp(const std::vector<double>& terms) {
  if (terms.empty()) return -INFINITY;
  const double peak = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - peak);
  return peak + std::log(acc);
}

}  // namespace

void RegimeSpec::validate() const {
  if (num_classes < 2) throw ConfigError("regime: N must be >= 2");
  if (n_dominant > num_classes) throw ConfigError("regime: n exceeds N");
  if (!(oracle_accuracy >= 0.0 && oracle_accuracy <= 1.0)) {
    throw ConfigError("regime: a* must lie in [0, 1]");
  }
  if (n_dominant > 0 && !(skew >= 0.0 && skew <= 1.0)) {
    throw ConfigError("regime: p must lie in [0, 1]");
  }
  if (support < 1 || window < support) throw ConfigError("regime: need w >= c >= 1");
}

double prob_dominant_class(std::size_t num_classes, double a_star, std::size_t n, double p) {
  if (n == 0 || n > num_classes || num_classes < 2) {
    throw std::domain_error("prob_dominant_class: need 1 <= n <= N and N >= 2");
  }
  const double big_n = static_cast<double>(num_classes);
  const double dn = static_cast<double>(n);
  const double miss = 1.0 - a_star;
  return (p * a_star + p * miss * (dn - 1.0) / (big_n - 1.0) +
          (1.0 - p) * miss * dn / (big_n - 1.0)) /
         dn;
}

double prob_nondominant_class(std::size_t num_classes, double a_star, std::size_t n, double p) {
  if (n >= num_classes || num_classes < 2) {
    throw std::domain_error("prob_nondominant_class: need n < N and N >= 2");
  }
  if (n == 0) p = 0.0;
  const double big_n = static_cast<double>(num_classes);
  const double rest = big_n - static_cast<double>(n);
  const double miss = 1.0 - a_star;
  return ((1.0 - p) * a_star + (1.0 - p) * miss * (rest - 1.0) / (big_n - 1.0) +
          p * miss * rest / (big_n - 1.0)) /
         rest;
}

double detection_probability(double q, std::size_t window, std::size_t support) {
  if (support == 0) return 1.0;
  if (support > window || q <= 0.0) return 0.0;
  if (q >= 1.0) return 1.0;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double mean = static_cast<double>(window) * q;
  std::vector<double> terms;
  if (static_cast<double>(support) > mean) {
    // Upper tail is the small side: sum it directly.
    for (std::size_t k = support; k <= window; ++k) {
      terms.push_back(log_binomial_pmf(window, k, log_q, log_1mq));
    }
    return std::min(1.0, std::exp(log_sum_exp(terms)));
  }
  for (std::size_t k = 0; k < support; ++k) {
    terms.push_back(log_binomial_pmf(window, k, log_q, log_1mq));
  }
  return std::max(0.0, -std::expm1(log_sum_exp(terms)));
}

std::vector<WindowSupportRow> window_support_table(std::span<const RegimeSpec> regimes) {
  std::vector<WindowSupportRow> rows;
  rows.reserve(regimes.size());
  for (const RegimeSpec& r : regimes) {
    r.validate();
    WindowSupportRow row{r, std::nullopt, 0.0};
    if (r.n_dominant > 0) {
      row.p_in = detection_probability(
          prob_dominant_class(r.num_classes, r.oracle_accuracy, r.n_dominant, r.skew),
          r.window, r.support);
    }
    if (r.n_dominant < r.num_classes) {
      row.p_out = detection_probability(
          prob_nondominant_class(r.num_classes, r.oracle_accuracy, r.n_dominant, r.skew),
          r.window, r.support);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<RegimeSpec> builtin_regimes() {
  return {
      {1000, 0.68, 5, 0.9, 30, 2},  {1000, 0.68, 10, 0.9, 30, 2},
      {1000, 0.68, 10, 0.9, 60, 2}, {1000, 0.68, 10, 0.7, 60, 2},
      {1000, 0.68, 10, 0.7, 90, 2}, {205, 0.58, 10, 0.9, 90, 2},
      {205, 0.58, 10, 0.9, 90, 3},  {205, 0.58, 0, 0.0, 90, 3},
  };
}

SupportRecommendation recommend_support(const RegimeSpec& regime, double target_p_out) {
  if (!(target_p_out > 0.0 && target_p_out <= 1.0)) {
    throw ConfigError("recommend_support: target must lie in (0, 1]");
  }
  RegimeSpec r = regime;
  r.support = 1;
  r.validate();
  const double q_out =
      prob_nondominant_class(r.num_classes, r.oracle_accuracy, r.n_dominant, r.skew);
  std::optional<double> q_in;
  if (r.n_dominant > 0) {
    q_in = prob_dominant_class(r.num_classes, r.oracle_accuracy, r.n_dominant, r.skew);
  }
  auto make = [&](std::size_t c, double p_out, bool unreachable) {
    SupportRecommendation rec{c, std::nullopt, p_out, unreachable};
    if (q_in) rec.p_in = detection_probability(*q_in, r.window, c);
    return rec;
  };
  for (std::size_t c = 1; c <= r.window; ++c) {
    const double p_out = detection_probability(q_out, r.window, c);
    if (p_out <= target_p_out) return make(c, p_out, false);
  }
  return make(r.window, detection_probability(q_out, r.window, r.window), true);
}

std::size_t minimal_cover(std::vector<std::size_t> counts, double skew_percent) {
  std::sort(counts.begin(), counts.end(), std::greater<>());
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  const double threshold = skew_percent * static_cast<double>(total);
  std::size_t covered = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    covered += counts[k];
    if (100.0 * static_cast<double>(covered) > threshold) return k + 1;
  }
  // Only reachable for skew_percent >= 100: nothing covers strictly more.
  return counts.size() + 1;
}

SkewCdf skew_cdf(std::span<const StreamItem> trace, std::size_t segment_length,
                 std::span<const double> skews_percent) {
  if (trace.empty()) throw ConfigError("skew_cdf: empty trace");
  if (segment_length == 0) throw ConfigError("skew_cdf: segment length must be >= 1");

  SkewCdf cdf;
  cdf.segment_length = segment_length;
  cdf.segments = trace.size() / segment_length;

  std::vector<std::vector<std::size_t>> covers(skews_percent.size());
  std::size_t max_cover = 1;
  std::unordered_map<ClassLabel, std::size_t> freq;
  for (std::size_t s = 0; s < cdf.segments; ++s) {
    freq.clear();
    for (std::size_t i = s * segment_length; i < (s + 1) * segment_length; ++i) {
      ++freq[trace[i].true_label];
    }
    std::vector<std::size_t> counts;
    counts.reserve(freq.size());
    for (const auto& [label, count] : freq) counts.push_back(count);
    for (std::size_t k = 0; k < skews_percent.size(); ++k) {
      const std::size_t cover = minimal_cover(counts, skews_percent[k]);
      covers[k].push_back(cover);
      max_cover = std::max(max_cover, cover);
    }
  }

  for (std::size_t k = 0; k < skews_percent.size(); ++k) {
    SkewCurve curve{skews_percent[k], std::vector<double>(max_cover, 0.0)};
    if (cdf.segments > 0) {
      std::vector<std::size_t> hist(max_cover + 1, 0);
      for (std::size_t c : covers[k]) ++hist[c];
      std::size_t running = 0;
      for (std::size_t n = 1; n <= max_cover; ++n) {
        running += hist[n];
        curve.fraction[n - 1] =
            static_cast<double>(running) / static_cast<double>(cdf.segments);
      }
    }
    cdf.curves.push_back(std::move(curve));
  }
  return cdf;
}

}  // namespace skewsim
