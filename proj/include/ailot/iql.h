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

#ifndef AILOT_IQL_H_
#define AILOT_IQL_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "ailot/dataset.h"
#include "ailot/env.h"
#include "ailot/policy.h"

namespace ailot {

struct IqlTables {
  Eigen::MatrixXd q;  // n_states x n_actions
  Eigen::VectorXd v;  // n_states
};

struct IqlConfig {
  double gamma = 0.99;
  double expectile = 0.7;
  double temperature = 6.0;
  double learning_rate = 0.1;
  int steps = 20000;
  int batch_size = 256;
  std::uint64_t seed = 0;
  // Arrivals at the goal bootstrap as if the goal's reward were collected
  // forever, r / (1 - gamma). Off: plain r + gamma (1 - done) V(s').
  bool absorbing_goal = true;

  void Validate() const;
};

// (s_i, a_i, r(s_{i+1}), s_{i+1}, done) with done set when s_{i+1} is the
// dataset's goal.
struct Transition {
  int s = 0;
  int a = 0;
  double r = 0.0;
  int s_next = 0;
  bool done = false;
};

// Throws InputError when a trajectory lacks actions or rewards.
std::vector<Transition> ExtractTransitions(const Dataset& dataset);

struct IqlResult {
  IqlTables tables;
  Policy policy;
};

// Tabular implicit Q-learning. Each step samples batch_size transitions
// uniformly and applies, per touched table entry, the mean of its item
// updates:
//   V(s)   += lr * w * (Q(s,a) - V(s)),   w = |expectile - 1(Q - V < 0)|
//   Q(s,a) += lr * (r + gamma (1 - done) V(s') - Q(s,a))
// (target r / (1 - gamma) on done items with absorbing_goal),
// both computed from the tables as they were at the start of the step.
IqlResult IqlTrain(const Dataset& dataset, int n_actions,
                   const IqlConfig& config);

// One expectile regression pass of V toward a fixed Q over sampled
// (s, a) pairs of `transitions`; exposed for testing the value update.
Eigen::VectorXd FitValueToQ(const Eigen::MatrixXd& q,
                            const std::vector<Transition>& transitions,
                            const IqlConfig& config);

// Greedy argmax over actions observed at s of
// count(s, a) * exp((Q(s,a) - V(s)) / temperature), evaluated in log space;
// smallest action on ties, action 0 for unseen states.
Policy ExtractPolicy(const IqlTables& tables,
                     const std::vector<Transition>& transitions,
                     double temperature);

struct EvalResult {
  int episodes = 0;
  double success_rate = 0.0;
  double mean_length = 0.0;
};

// Episode e uses seed + e for its start state and any stochastic actions.
EvalResult Evaluate(const Policy& policy, const Environment& env,
                    int n_episodes, std::uint64_t seed);

std::string EvalCsv(const EvalResult& result);

void SavePolicy(const IqlResult& result, const std::filesystem::path& path);
IqlResult LoadPolicy(const std::filesystem::path& path);

}  // namespace ailot

#endif  // AILOT_IQL_H_
