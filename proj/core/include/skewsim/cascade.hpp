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

#ifndef SKEWSIM_CASCADE_HPP_
#define SKEWSIM_CASCADE_HPP_

#include <cstddef>

#include "skewsim/models.hpp"

namespace skewsim {

// A specialized model chained with the oracle: if the specialist predicts a
// label in D that label is final, otherwise the oracle answers.
struct CascadedClassifier {
  SpecializedModel specialized;
  OracleProfile oracle;

  double run_cost_ms() const { return specialized.profile.run_cost_ms; }
};

struct CascadeOutcome {
  ClassLabel label = 0;
  bool cascaded = false;
  // R_h, or R_h + R* when cascaded.
  double cost_ms = 0.0;
};

CascadeOutcome cascaded_classify(const CascadedClassifier& cc, ClassLabel true_label,
                                 Rng& rng);

// Expected accuracy of the cascade when a fraction `skew` of inputs fall in D:
//   skew*a_in + skew*e_in_out*a* + (1-skew)*a_out*a*
double estimate_accuracy(double skew, const SpecializationParams& params, double a_star);

// Probability that the cascade falls through to the oracle. The wrong
// in-context mass becomes "other" when |D| == 1.
double expected_cascade_rate(double skew, const SpecializationParams& params,
                             std::size_t dom_size);

// R_h + rate * R*.
double expected_cascade_cost(double skew, const SpecializationParams& params,
                             std::size_t dom_size, double run_cost_ms,
                             double oracle_cost_ms);

}  // namespace skewsim

#endif  // SKEWSIM_CASCADE_HPP_
