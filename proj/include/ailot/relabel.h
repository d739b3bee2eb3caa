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

#ifndef AILOT_RELABEL_H_
#define AILOT_RELABEL_H_

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ailot/dataset.h"
#include "ailot/intent.h"
#include "ailot/ot.h"

namespace ailot {

enum class Aggregator { kMax, kMin };
enum class RescaleMode { kNone, kIqlRange, kIqlRangeMinusOne };

struct RelabelConfig {
  double alpha = 5.0;
  double tau = 0.5;
  int k = 2;
  double epsilon = 1e-3;
  int max_iters = 200;
  double tolerance = 1e-9;
  Aggregator aggregator = Aggregator::kMax;
  RescaleMode rescale = RescaleMode::kNone;
  // Worker threads for independent agent trajectories; output does not
  // depend on it.
  int threads = 1;

  void Validate() const;
  SinkhornOptions Sinkhorn() const;
};

std::string ToString(Aggregator aggregator);
std::string ToString(RescaleMode mode);
Aggregator ParseAggregator(const std::string& text);
RescaleMode ParseRescaleMode(const std::string& text);

// Alignment of one agent trajectory against one expert trajectory.
struct PairAlignment {
  std::vector<double> rewards;
  int tail_start = 0;  // 0-based first expert column kept
  double transport_cost = 0.0;
  int iterations_run = 0;
  double marginal_error = 0.0;
};

struct TrajectoryProvenance {
  int chosen_expert = 0;
  std::vector<PairAlignment> per_expert;  // rewards cleared
};

struct RelabeledDataset {
  Dataset dataset;
  std::vector<TrajectoryProvenance> provenance;
};

// r_i = alpha * exp(-tau * agent_length * sum_j P_ij C_ij). Throws
// InputError when shapes disagree or agent_length != plan rows.
std::vector<double> RewardFromPlan(const Eigen::MatrixXd& plan,
                                   const Eigen::MatrixXd& cost_tail,
                                   int agent_length, double alpha, double tau);

PairAlignment RelabelPair(const std::vector<int>& agent_states,
                          const std::vector<int>& expert_states,
                          const IntentModel& model,
                          const RelabelConfig& config);

// Per-state aggregation over experts with config.aggregator; the chosen
// expert of a trajectory is the one with the largest (max) or smallest (min)
// summed reward, lowest index on ties. Applies config.rescale.
RelabeledDataset RelabelDataset(const Dataset& agent, const Dataset& expert,
                                const IntentModel& model,
                                const RelabelConfig& config);

// iql-range multiplies every reward by 1000 / (max_return - min_return);
// iql-range-minus-one first subtracts 1 from every reward. Throws
// DegenerateRangeError when all returns coincide.
RelabeledDataset RescaleRewards(const RelabeledDataset& relabeled,
                                RescaleMode mode);

std::string SerializeProvenance(const RelabeledDataset& relabeled);
void SaveProvenance(const RelabeledDataset& relabeled,
                    const std::filesystem::path& path);

}  // namespace ailot

#endif  // AILOT_RELABEL_H_
