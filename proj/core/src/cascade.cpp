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

#include "skewsim/cascade.hpp"

namespace skewsim {

CascadeOutcome cascaded_classify(const CascadedClassifier& cc, ClassLabel true_label,
                                 Rng& rng) {
  const double run_cost = cc.run_cost_ms();
  if (auto y = specialized_classify(cc.specialized, true_label, rng)) {
    return {*y, false, run_cost};
  }
  // The oracle's answer is final even when it lands outside D.
  return {oracle_classify(cc.oracle, true_label, rng), true, run_cost + cc.oracle.cost_ms};
}

double estimate_accuracy(double skew, const SpecializationParams& params, double a_star) {
  return skew * params.a_in + skew * params.e_in_out * a_star +
         (1.0 - skew) * params.a_out * a_star;
}

double expected_cascade_rate(double skew, const SpecializationParams& params,
                             std::size_t dom_size) {
  double in_other = params.e_in_out;
  if (dom_size == 1) in_other += 1.0 - params.a_in - params.e_in_out;
  return skew * in_other + (1.0 - skew) * params.a_out;
}

double expected_cascade_cost(double skew, const SpecializationParams& params,
                             std::size_t dom_size, double run_cost_ms,
                             double oracle_cost_ms) {
  return run_cost_ms + expected_cascade_rate(skew, params, dom_size) * oracle_cost_ms;
}

}  // namespace skewsim
