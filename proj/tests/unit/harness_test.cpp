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
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "skewsim/cascade.hpp"
#include "skewsim/config.hpp"
#include "skewsim/errors.hpp"
#include "skewsim/harness.hpp"

using namespace skewsim;

namespace {

RunConfig face_run(std::size_t n_dominant, std::size_t length, std::size_t reps) {
  RunConfig c;
  const auto face = *builtin_task("face");
  StreamSpec s;
  s.num_classes = 2622;
  s.segments = {{n_dominant, 0.9, length, std::nullopt}};
  c.stream = s;
  c.oracle = face.oracle;
  c.templates = {face.compact};
  c.weg.tau_a = face.tau_a;
  c.weg.training_skew = face.training_skew;
  c.seed = 1;
  c.repetitions = reps;
  c.config_hash = "test";
  return c;
}

std::string log_text(const SimulationResult& r) {
  std::ostringstream os;
  write_step_log(os, r);
  return os.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("oracle-only policy costs R* exactly and hits a*") {
  RunConfig c = face_run(0, 100000, 1);
  c.policy = parse_policy("oracle");
  const SimulationResult r = run_simulation(c);
  CHECK(r.mean.mean_cost_ms == 28.8);
  CHECK(r.mean.speedup == 1.0);
  CHECK(r.mean.special_rate == 0.0);
  const double se = std::sqrt(0.958 * 0.042 / 1e5);
  CHECK(std::abs(r.mean.accuracy - 0.958) <= 3.0 * se);
  REQUIRE(r.mean.regret_ms.has_value());
  CHECK(*r.mean.regret_ms == 0.0);
}

TEST_CASE("oracle-only regret on a skewed epoch is L times the cost gap") {
  RunConfig c = face_run(5, 1800, 1);
  c.policy = parse_policy("oracle");
  const RepetitionResult rep = run_repetition(c, 0);
  const Stream s = make_stream(c, 0);
  const auto cmp = best_per_epoch_costs(s, c.oracle, c.templates);
  REQUIRE(cmp.size() == 1);
  CHECK(cmp[0].best == "F2-like");
  const auto params = interpolate_profile(c.templates[0].param_table, 5);
  const double cascade = expected_cascade_cost(0.9, params, 5, 1.93, 28.8);
  CHECK(cmp[0].per_item_cost_ms == doctest::Approx(cascade));
  REQUIRE(rep.metrics.regret_ms.has_value());
  CHECK(*rep.metrics.regret_ms == doctest::Approx(1800.0 * (28.8 - cascade)).epsilon(1e-12));
  CHECK(*rep.metrics.regret_ms > 0.0);
}

TEST_CASE("WEG beats the oracle on regret with paired seeds") {
  RunConfig weg = face_run(5, 1800, 3);
  RunConfig oracle = weg;
  oracle.policy = parse_policy("oracle");
  const SimulationResult a = run_simulation(weg);
  const SimulationResult b = run_simulation(oracle);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(*a.repetitions[i].metrics.regret_ms < *b.repetitions[i].metrics.regret_ms);
  }
}

TEST_CASE("regret needs comparators that cover the log") {
  std::vector<StepRecord> log(10);
  std::vector<EpochComparator> cmp = {{0, 9, 1.0, "oracle"}};
  CHECK_THROWS_AS(compute_regret(log, cmp), std::invalid_argument);
  for (auto& s : log) s.cost_ms = 3.0;
  cmp[0].length = 10;
  CHECK(compute_regret(log, cmp) == doctest::Approx(20.0));
}

TEST_CASE("face-like scenario reaches a desk-scale speedup") {
  const SimulationResult r = run_simulation(face_run(5, 1800, 5));
  CHECK(r.mean.speedup >= 2.0);
  CHECK(r.mean.accuracy >= 0.958 - 0.03);
  CHECK(r.mean.retargets >= 1.0);
}

TEST_CASE("uniform stream costs the same as the oracle") {
  const SimulationResult r = run_simulation(face_run(0, 1800, 5));
  CHECK(std::abs(r.mean.mean_cost_ms - 28.8) <= 0.01 * 28.8);
}

TEST_CASE("identical configs give byte-identical logs") {
  const RunConfig c = face_run(5, 1200, 2);
  CHECK(log_text(run_simulation(c)) == log_text(run_simulation(c)));
  RunConfig other = c;
  other.seed = 2;
  CHECK(log_text(run_simulation(c)) != log_text(run_simulation(other)));
}

TEST_CASE("metrics recomputed from the log match exactly") {
  const SimulationResult r = run_simulation(face_run(5, 1800, 2));
  for (const auto& rep : r.repetitions) {
    std::size_t correct = 0, special = 0, cascaded = 0, retargets = 0;
    for (const auto& s : rep.log) {
      correct += s.correct ? 1 : 0;
      retargets += s.retargeted ? 1 : 0;
      if (s.phase == Phase::kSpecialized) {
        ++special;
        cascaded += s.cascaded ? 1 : 0;
      }
      CHECK(s.correct == (s.predicted == s.true_label));
    }
    const double n = static_cast<double>(rep.log.size());
    CHECK(rep.metrics.accuracy == static_cast<double>(correct) / n);
    CHECK(rep.metrics.special_rate == static_cast<double>(special) / n);
    CHECK(rep.metrics.cascade_rate == static_cast<double>(cascaded) / static_cast<double>(special));
    CHECK(rep.metrics.retargets == static_cast<double>(retargets));
    CHECK(rep.metrics.retargets == static_cast<double>(rep.specializations.size()));
  }
}

TEST_CASE("step log is valid JSON with the documented fields") {
  const SimulationResult r = run_simulation(face_run(5, 300, 1));
  std::istringstream in(log_text(r));
  std::string line;
  std::size_t t = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"t", "true_label", "predicted", "correct", "phase", "cascaded",
                            "explored", "retargeted", "cost_ms"}) {
      CHECK(j.contains(key));
    }
    CHECK(j["t"] == t);
    CHECK(j["cost_ms"].get<double>() == r.repetitions[0].log[t].cost_ms);
    ++t;
  }
  CHECK(t == 300);
}

TEST_CASE("metrics CSV has the documented columns and a mean row") {
  const SimulationResult r = run_simulation(face_run(5, 300, 2));
  std::ostringstream os;
  write_metrics_csv(os, r);
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  CHECK(header ==
        "run_id,policy,seed,repetition,items,accuracy,mean_cost_ms,oracle_only_cost_ms,speedup,"
        "special_rate,cascade_rate,retargets,mean_dom_size,mean_window_size,regret_ms");
  std::vector<std::string> rows;
  while (std::getline(in, row)) rows.push_back(row);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("test,weg,1,0,300,", 0) == 0);
  CHECK(rows[2].rfind("test,weg,1,mean,300,", 0) == 0);
}

TEST_CASE("trace replay reports regret as unavailable") {
  const auto dir = std::filesystem::temp_directory_path() / "skewsim_harness_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "trace.txt");
    out << "#N=2622\n";
    for (int i = 0; i < 200; ++i) out << i << ',' << (i % 3) << '\n';
  }
  RunConfig c = face_run(5, 10, 1);
  c.stream = TraceSource{dir / "trace.txt", 2622, 1.0 / 6.0};
  const SimulationResult r = run_simulation(c);
  CHECK(r.mean.items == 200);
  CHECK_FALSE(r.mean.regret_ms.has_value());
  std::ostringstream os;
  write_metrics_csv(os, r);
  CHECK(os.str().find(",NA\n") != std::string::npos);
}

TEST_CASE("config validation") {
  RunConfig c = face_run(5, 100, 1);
  c.repetitions = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = face_run(5, 100, 1);
  c.templates.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.policy = parse_policy("oracle");
  CHECK_NOTHROW(c.validate());
  c = face_run(5, 100, 1);
  c.oracle.num_classes = 1000;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("averaging keeps per-repetition rows recoverable") {
  const SimulationResult r = run_simulation(face_run(5, 600, 4));
  double acc = 0.0;
  for (const auto& rep : r.repetitions) acc += rep.metrics.accuracy;
  CHECK(r.mean.accuracy == doctest::Approx(acc / 4.0).epsilon(1e-14));
}

}  // TEST_SUITE
