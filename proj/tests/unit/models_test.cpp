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

#include <cmath>

#include "skewsim/errors.hpp"
#include "skewsim/models.hpp"

using namespace skewsim;

namespace {

// Three standard errors of a binomial proportion.
double three_sigma(double p, double n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

void check_params(const SpecializationParams& got, const SpecializationParams& want) {
  CHECK(got.a_in == doctest::Approx(want.a_in).epsilon(1e-12));
  CHECK(got.e_in_out == doctest::Approx(want.e_in_out).epsilon(1e-12));
  CHECK(got.a_out == doctest::Approx(want.a_out).epsilon(1e-12));
}

const ParamTable kTwoKeys = {{5, {0.9, 0.05, 0.9}}, {15, {0.8, 0.15, 0.7}}};

}  // namespace

TEST_SUITE("models") {

TEST_CASE("perfect oracle is always right") {
  Rng rng(1);
  const OracleProfile oracle{1.0, 28.8, 1000};
  for (ClassLabel y = 0; y < 1000; ++y) CHECK(oracle_classify(oracle, y, rng) == y);
}

TEST_CASE("oracle accuracy matches a* within 3 sigma") {
  Rng rng(2);
  const OracleProfile oracle{0.68, 11.0, 1000};
  const int draws = 1000000;
  int correct = 0;
  for (int i = 0; i < draws; ++i) correct += oracle_classify(oracle, 17, rng) == 17 ? 1 : 0;
  CHECK(std::abs(correct / double(draws) - 0.68) <= three_sigma(0.68, draws));
}

TEST_CASE("oracle errors are uniform over the other labels") {
  Rng rng(3);
  const OracleProfile oracle{0.0, 1.0, 5};
  std::vector<int> counts(5, 0);
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) ++counts[oracle_classify(oracle, 2, rng)];
  CHECK(counts[2] == 0);
  for (int y : {0, 1, 3, 4}) {
    CHECK(std::abs(counts[y] / double(draws) - 0.25) <= three_sigma(0.25, draws));
  }
}

TEST_CASE("a zero-accuracy binary oracle always flips") {
  Rng rng(4);
  const OracleProfile oracle{0.0, 1.0, 2};
  for (int i = 0; i < 100; ++i) CHECK(oracle_classify(oracle, 0, rng) == 1);
}

TEST_CASE("interpolation: clamp, midpoint, exact keys") {
  const ParamTable single = {{5, {0.9, 0.05, 0.9}}};
  for (std::size_t n : {1u, 5u, 100u}) check_params(interpolate_profile(single, n), {0.9, 0.05, 0.9});
  check_params(interpolate_profile(kTwoKeys, 10), {0.85, 0.10, 0.8});
  check_params(interpolate_profile(kTwoKeys, 20), {0.8, 0.15, 0.7});
  check_params(interpolate_profile(kTwoKeys, 1), {0.9, 0.05, 0.9});
  check_params(interpolate_profile(kTwoKeys, 5), {0.9, 0.05, 0.9});
  check_params(interpolate_profile(kTwoKeys, 15), {0.8, 0.15, 0.7});
  check_params(interpolate_profile(kTwoKeys, 7), {0.88, 0.07, 0.86});
}

TEST_CASE("specialize interpolates at |D| and is deterministic") {
  const CompactProfile t{"T", 1.0, 2.0, kTwoKeys};
  const SpecializedModel a = specialize(t, {1, 2, 3, 4, 5}, 0.6);
  check_params(a.params, {0.9, 0.05, 0.9});
  CHECK(a.training_skew == 0.6);
  const SpecializedModel b = specialize(t, {1, 2, 3, 4, 5}, 0.6);
  CHECK(a.params == b.params);
  CHECK(a.dominant_set == b.dominant_set);

  LabelSet ten;
  for (ClassLabel i = 0; i < 10; ++i) ten.push_back(i * 3);
  check_params(specialize(t, ten, 0.6).params, {0.85, 0.10, 0.8});
  check_params(specialize(t, ten, 0.6, 0.5).params, {0.85, 0.10, 0.4});
}

TEST_CASE("specialize rejects an empty dominant set") {
  const CompactProfile t{"T", 1.0, 2.0, kTwoKeys};
  CHECK_THROWS_AS(specialize(t, {}, 0.5), std::logic_error);
}

TEST_CASE("perfect specialist") {
  Rng rng(5);
  const SpecializedModel m{{"T", 1.0, 1.0, {{1, {1, 0, 1}}}}, {2, 4, 6}, {1, 0, 1}, 0.5};
  for (int i = 0; i < 1000; ++i) {
    CHECK(specialized_classify(m, 4, rng) == std::optional<ClassLabel>(4));
    CHECK_FALSE(specialized_classify(m, 5, rng).has_value());
  }
}

TEST_CASE("specialist outcome frequencies match its parameters") {
  Rng rng(6);
  const SpecializationParams p{0.8, 0.15, 0.9};
  const SpecializedModel m{{"T", 1.0, 1.0, {{3, p}}}, {10, 20, 30}, p, 0.5};
  const int draws = 1000000;
  int correct = 0, other = 0, wrong = 0;
  for (int i = 0; i < draws; ++i) {
    const auto out = specialized_classify(m, 20, rng);
    if (!out) {
      ++other;
    } else if (*out == 20) {
      ++correct;
    } else {
      ++wrong;
      REQUIRE(m.in_context(*out));
    }
  }
  CHECK(std::abs(correct / double(draws) - 0.8) <= three_sigma(0.8, draws));
  CHECK(std::abs(other / double(draws) - 0.15) <= three_sigma(0.15, draws));
  CHECK(std::abs(wrong / double(draws) - 0.05) <= three_sigma(0.05, draws));

  int out_other = 0;
  for (int i = 0; i < draws; ++i) out_other += specialized_classify(m, 7, rng) ? 0 : 1;
  CHECK(std::abs(out_other / double(draws) - 0.9) <= three_sigma(0.9, draws));
}

TEST_CASE("wrong in-context mass becomes other for a singleton set") {
  Rng rng(7);
  const SpecializationParams p{0.5, 0.0, 1.0};
  const SpecializedModel m{{"T", 1.0, 1.0, {{1, p}}}, {3}, p, 0.5};
  int other = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto out = specialized_classify(m, 3, rng);
    if (out) {
      CHECK(*out == 3);
    } else {
      ++other;
    }
  }
  CHECK(std::abs(other / double(draws) - 0.5) <= three_sigma(0.5, draws));
}

TEST_CASE("identical randomness streams reproduce outputs") {
  const SpecializationParams p{0.7, 0.1, 0.6};
  const SpecializedModel m{{"T", 1.0, 1.0, {{4, p}}}, {1, 2, 3, 4}, p, 0.5};
  Rng a(99), b(99);
  for (ClassLabel y = 0; y < 500; ++y) {
    CHECK(specialized_classify(m, y % 8, a) == specialized_classify(m, y % 8, b));
  }
}

TEST_CASE("profile validation") {
  const OracleProfile oracle{0.9, 10.0, 100};
  CHECK_NOTHROW(oracle.validate());
  CHECK_THROWS_AS((OracleProfile{0.0, 10.0, 100}.validate()), ConfigError);
  CHECK_THROWS_AS((OracleProfile{0.9, 0.0, 100}.validate()), ConfigError);
  CHECK_THROWS_AS((SpecializationParams{0.8, 0.3, 0.5}.validate()), ConfigError);
  CHECK_THROWS_AS((CompactProfile{"T", 10.0, 1.0, kTwoKeys}.validate(oracle)), ConfigError);
  CHECK_THROWS_AS((CompactProfile{"T", 1.0, 1.0, {}}.validate(oracle)), ConfigError);
  CHECK_NOTHROW((CompactProfile{"T", 1.0, 1.0, kTwoKeys}.validate(oracle)));
}

TEST_CASE("built-in presets carry the published costs") {
  const auto face = builtin_task("face");
  REQUIRE(face);
  CHECK(face->oracle.cost_ms == 28.8);
  CHECK(face->oracle.accuracy == 0.958);
  CHECK(face->compact.run_cost_ms == 1.93);
  CHECK(face->compact.retarget_cost_s == 4.0);
  CHECK(face->tau_a == -0.05);
  CHECK(face->training_skew == 0.5);
  const auto object = builtin_task("object");
  REQUIRE(object);
  CHECK(object->oracle.cost_ms == 11.0);
  CHECK(object->compact.run_cost_ms == 2.8);
  CHECK(object->compact.retarget_cost_s == 14.0);
  CHECK(object->training_skew == 0.6);
  const auto scene = builtin_task("scene");
  REQUIRE(scene);
  CHECK(scene->oracle.cost_ms == 28.8);
  CHECK(scene->compact.run_cost_ms == 2.44);
  CHECK(scene->compact.retarget_cost_s == 14.0);
  CHECK(scene->training_skew == 0.7);
  CHECK_FALSE(builtin_task("speech"));
  for (const char* name : {"F2-like", "O2-like", "S2-like"}) {
    const auto t = builtin_template(name);
    REQUIRE(t);
    CHECK(t->name == name);
  }
  CHECK_NOTHROW(face->compact.validate(face->oracle));
  CHECK_NOTHROW(object->compact.validate(object->oracle));
  CHECK_NOTHROW(scene->compact.validate(scene->oracle));
}

TEST_CASE("face template keeps uniform streams from specializing") {
  // With p ~ 0 the cascade estimate is a_out * a*, which must stay below a* - 0.05.
  const auto face = builtin_task("face");
  for (const auto& [n, params] : face->compact.param_table) {
    CHECK(params.a_out * face->oracle.accuracy < face->oracle.accuracy + face->tau_a);
  }
}

}  // TEST_SUITE
