// Copyright 2026 The AILOT Authors
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

#ifndef AILOT_POLICY_H_
#define AILOT_POLICY_H_

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace ailot {

// Tabular policy over integer states. When `probabilities` is set the policy
// is stochastic (rows are per-state action distributions) and `greedy` holds
// the per-state argmax; otherwise actions come from `greedy`.
struct Policy {
  int n_actions = 0;
  std::vector<int> greedy;
  std::optional<Eigen::MatrixXd> probabilities;

  static Policy Uniform(int n_states, int n_actions);

  bool operator==(const Policy& other) const;
};

}  // namespace ailot

#endif  // AILOT_POLICY_H_
