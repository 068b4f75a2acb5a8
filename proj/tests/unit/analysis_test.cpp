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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "skewsim/analysis.hpp"
#include "skewsim/errors.hpp"
#include "skewsim/models.hpp"
#include "skewsim/random.hpp"

using namespace skewsim;

namespace {

// Reference tail probabilities from an independent binomial implementation
// (scipy.stats.binom.sf), frozen per built-in regime.
struct Frozen {
  double p_in;  // NaN when undefined
  double p_out;
};
const Frozen kReference[] = {
    {0.8975453945532981, 6.52246788979519e-05},
    {0.5581641616420647, 6.534011330600817e-05},
    {0.8905419252253719, 0.0002638089492241601},
    {0.7886169520854711, 0.0004803802555890098},
    {0.9333101376301571, 0.0010756152209695094},
    {0.9587263403586259, 0.019369725192068237},
    {0.8708197789853006, 0.0013170193111105978},
    {NAN, 0.009947414799507002},
};

// Smallest subset of labels, found by exhaustive search, whose total count
// strictly exceeds s% of all items.
std::size_t brute_force_cover(const std::vector<std::size_t>& counts, double s) {
  const std::size_t m = counts.size();
  std::size_t total = 0;
  for (auto c : counts) total += c;
  std::size_t best = m + 1;
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    std::size_t covered = 0, size = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (std::size_t{1} << i)) {
        covered += counts[i];
        ++size;
      }
    }
    if (100.0 * static_cast<double>(covered) > s * static_cast<double>(total)) {
      best = std::min(best, size);
    }
  }
  return best;
}

std::vector<StreamItem> trace_of(const std::vector<ClassLabel>& labels) {
  std::vector<StreamItem> items;
  for (std::size_t i = 0; i < labels.size(); ++i) items.push_back({i, labels[i], 0});
  return items;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("per-class probabilities: trivial regimes") {
  CHECK(prob_dominant_class(100, 1.0, 4, 1.0) == doctest::Approx(0.25));
  CHECK(prob_dominant_class(100, 1.0, 4, 0.0) == 0.0);
  CHECK(prob_nondominant_class(50, 1.0, 0, 0.7) == doctest::Approx(1.0 / 50));
  CHECK(prob_nondominant_class(50, 1.0, 5, 1.0) == 0.0);
  CHECK(prob_dominant_class(1000, 0.68, 5, 0.9) == doctest::Approx(0.12266).epsilon(1e-4));
  CHECK(prob_nondominant_class(1000, 0.68, 5, 0.9) ==
        doctest::Approx((1.0 - 5 * prob_dominant_class(1000, 0.68, 5, 0.9)) / 995).epsilon(1e-12));
}

TEST_CASE("per-class probabilities reject undefined regimes") {
  CHECK_THROWS_AS(prob_dominant_class(100, 0.9, 0, 0.5), std::domain_error);
  CHECK_THROWS_AS(prob_nondominant_class(100, 0.9, 100, 0.5), std::domain_error);
}

TEST_CASE("dominant-class probability matches an oracle simulation") {
  Rng rng(11);
  const OracleProfile oracle{0.68, 1.0, 1000};
  const int draws = 1000000;
  int hits = 0;
  // Dominant classes are 0..4; count outputs equal to class 0.
  for (int i = 0; i < draws; ++i) {
    ClassLabel y = uniform01(rng) < 0.9 ? static_cast<ClassLabel>(uniform_index(rng, 5))
                                        : static_cast<ClassLabel>(5 + uniform_index(rng, 995));
    hits += oracle_classify(oracle, y, rng) == 0 ? 1 : 0;
  }
  CHECK(std::abs(hits / double(draws) - 0.12266) < 0.001);
}

TEST_CASE("total probability over random regimes") {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t big_n = 2 + uniform_index(rng, 3000);
    const std::size_t n = 1 + uniform_index(rng, big_n - 1);
    const double a = uniform01(rng);
    const double p = uniform01(rng);
    const double total = static_cast<double>(n) * prob_dominant_class(big_n, a, n, p) +
                         static_cast<double>(big_n - n) * prob_nondominant_class(big_n, a, n, p);
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("detection probability edge cases") {
  CHECK(detection_probability(1.0, 30, 2) == 1.0);
  CHECK(detection_probability(1.0, 5, 5) == 1.0);
  CHECK(detection_probability(0.0, 30, 1) == 0.0);
  CHECK(detection_probability(0.3, 10, 1) == doctest::Approx(1.0 - std::pow(0.7, 10)).epsilon(1e-12));
  CHECK(detection_probability(0.07, 45, 3) == doctest::Approx(0.618449629540191).epsilon(1e-10));
  CHECK(detection_probability(0.001, 200, 5) == doctest::Approx(2.1560164186571525e-06).epsilon(1e-9));
}

TEST_CASE("built-in regimes match independent tail sums") {
  const auto rows = window_support_table(builtin_regimes());
  REQUIRE(rows.size() == 8);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CAPTURE(i);
    if (std::isnan(kReference[i].p_in)) {
      CHECK_FALSE(rows[i].p_in.has_value());
    } else {
      REQUIRE(rows[i].p_in.has_value());
      CHECK(*rows[i].p_in == doctest::Approx(kReference[i].p_in).epsilon(1e-9));
    }
    CHECK(rows[i].p_out == doctest::Approx(kReference[i].p_out).epsilon(1e-9));
  }
}

TEST_CASE("published table values at their printed precision") {
  const auto rows = window_support_table(builtin_regimes());
  auto round_to = [](double v, int sig) {
    const double scale = std::pow(10.0, sig - 1 - static_cast<int>(std::floor(std::log10(v))));
    return std::round(v * scale) / scale;
  };
  CHECK(round_to(*rows[1].p_in, 3) == doctest::Approx(0.558));
  CHECK(round_to(rows[1].p_out, 3) == doctest::Approx(6.53e-5));
  CHECK(round_to(*rows[2].p_in, 3) == doctest::Approx(0.891));
  CHECK(round_to(rows[2].p_out, 3) == doctest::Approx(2.64e-4));
  CHECK(round_to(*rows[3].p_in, 3) == doctest::Approx(0.789));
  CHECK(round_to(rows[3].p_out, 3) == doctest::Approx(4.80e-4));
  CHECK(round_to(*rows[4].p_in, 3) == doctest::Approx(0.933));
  CHECK(round_to(rows[4].p_out, 3) == doctest::Approx(1.08e-3));
  CHECK(round_to(*rows[5].p_in, 3) == doctest::Approx(0.959));
  CHECK(round_to(rows[5].p_out, 2) == doctest::Approx(0.019));
  CHECK(round_to(rows[0].p_out, 3) == doctest::Approx(6.52e-5));
}

TEST_CASE("detection probability matches simulated windows") {
  Rng rng(13);
  for (std::size_t row : {0u, 2u, 6u}) {
    const RegimeSpec r = builtin_regimes()[row];
    const double q = prob_dominant_class(r.num_classes, r.oracle_accuracy, r.n_dominant, r.skew);
    const double want = detection_probability(q, r.window, r.support);
    const int windows = 100000;
    int hits = 0;
    for (int k = 0; k < windows; ++k) {
      std::size_t count = 0;
      for (std::size_t t = 0; t < r.window; ++t) count += uniform01(rng) < q ? 1 : 0;
      hits += count >= r.support ? 1 : 0;
    }
    CAPTURE(row);
    CHECK(std::abs(hits / double(windows) - want) <= 3.0 * std::sqrt(want * (1 - want) / windows));
  }
}

TEST_CASE("detection probability is monotone") {
  Rng rng(14);
  for (int i = 0; i < 500; ++i) {
    const double q = uniform01(rng) * 0.5;
    const std::size_t w = 1 + uniform_index(rng, 150);
    const std::size_t c = 1 + uniform_index(rng, w);
    const double base = detection_probability(q, w, c);
    CHECK(detection_probability(q, w + 1, c) >= base - 1e-15);
    CHECK(detection_probability(q + 0.05, w, c) >= base - 1e-15);
    if (c < w) CHECK(detection_probability(q, w, c + 1) <= base + 1e-15);
  }
}

TEST_CASE("recommend_support") {
  RegimeSpec row6{205, 0.58, 10, 0.9, 90, 1};
  const auto rec = recommend_support(row6, 0.01);
  CHECK(rec.support == 3);
  CHECK(rec.p_out == doctest::Approx(0.0013170193111105978).epsilon(1e-9));
  REQUIRE(rec.p_in.has_value());
  CHECK(*rec.p_in == doctest::Approx(0.8708197789853006).epsilon(1e-9));
  CHECK_FALSE(rec.target_unreachable);

  CHECK(recommend_support(row6, 1.0).support == 1);
  // Every input is dominant and the oracle is perfect: q_out = 0.
  CHECK(recommend_support({100, 1.0, 5, 1.0, 30, 1}, 0.01).support == 1);
  CHECK(recommend_support({2, 1.0, 0, 0.0, 10, 1}, 0.1).support == 8);
  // No skew and a perfect oracle: the single non-dominant class is always seen.
  const auto forced = recommend_support({2, 1.0, 1, 0.0, 10, 1}, 0.1);
  CHECK(forced.support == 10);
  CHECK(forced.p_out == 1.0);
  CHECK(forced.target_unreachable);
  CHECK_THROWS_AS(recommend_support(row6, 0.0), ConfigError);
}

TEST_CASE("minimal cover agrees with exhaustive search") {
  Rng rng(15);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::size_t> counts(1 + uniform_index(rng, 10));
    for (auto& c : counts) c = 1 + uniform_index(rng, 20);
    for (double s : {50.0, 60.0, 70.0, 80.0, 90.0, 99.0}) {
      CHECK(minimal_cover(counts, s) == brute_force_cover(counts, s));
    }
  }
}

TEST_CASE("minimal cover uses a strict threshold") {
  CHECK(minimal_cover({9, 1}, 90.0) == 2);
  CHECK(minimal_cover({10}, 90.0) == 1);
  CHECK(minimal_cover({5, 5}, 50.0) == 2);
}

TEST_CASE("skew cdf: single-label segment") {
  const auto trace = trace_of(std::vector<ClassLabel>(20, 4));
  const double skews[] = {90.0};
  const SkewCdf cdf = skew_cdf(trace, 20, skews);
  CHECK(cdf.segments == 1);
  REQUIRE(cdf.curves.size() == 1);
  REQUIRE_FALSE(cdf.curves[0].fraction.empty());
  CHECK(cdf.curves[0].fraction[0] == 1.0);
}

TEST_CASE("skew cdf: uniform segments match brute force") {
  const std::size_t n = 12;
  std::vector<ClassLabel> labels;
  for (int rep = 0; rep < 3; ++rep) {
    for (ClassLabel y = 0; y < n; ++y) labels.push_back(y);
  }
  labels.push_back(0);  // partial trailing segment is dropped
  const double skews[] = {90.0};
  const SkewCdf cdf = skew_cdf(trace_of(labels), n, skews);
  CHECK(cdf.segments == 3);
  const std::size_t cover = brute_force_cover(std::vector<std::size_t>(n, 1), 90.0);
  CHECK(cover == 11);
  const auto& f = cdf.curves[0].fraction;
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(f[k] == (k + 1 >= cover ? 1.0 : 0.0));
}

TEST_CASE("skew cdf curves are non-decreasing") {
  Rng rng(16);
  std::vector<ClassLabel> labels;
  for (int i = 0; i < 5000; ++i) {
    labels.push_back(uniform01(rng) < 0.7 ? static_cast<ClassLabel>(uniform_index(rng, 4))
                                          : static_cast<ClassLabel>(uniform_index(rng, 60)));
  }
  const double skews[] = {60.0, 70.0, 80.0, 90.0};
  const SkewCdf cdf = skew_cdf(trace_of(labels), 100, skews);
  CHECK(cdf.segments == 50);
  for (const auto& curve : cdf.curves) {
    for (std::size_t k = 1; k < curve.fraction.size(); ++k) {
      CHECK(curve.fraction[k] >= curve.fraction[k - 1]);
    }
    CHECK(curve.fraction.back() == 1.0);
  }
  // A higher skew needs at least as many labels.
  for (std::size_t k = 0; k < cdf.curves[0].fraction.size(); ++k) {
    CHECK(cdf.curves[0].fraction[k] >= cdf.curves[3].fraction[k]);
  }
}

TEST_CASE("skew cdf rejects degenerate input") {
  const double skews[] = {90.0};
  CHECK_THROWS_AS(skew_cdf({}, 10, skews), ConfigError);
  CHECK_THROWS_AS(skew_cdf(trace_of({1, 2}), 0, skews), ConfigError);
}

}  // TEST_SUITE
