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

#ifndef AILOT_OT_H_
#define AILOT_OT_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ailot {

// Lookahead cost between an agent trajectory (rows) and an expert trajectory
// (columns) in intent space.
struct CostMatrix {
  Eigen::MatrixXd values;
  int k = 1;
};

struct TransportPlan {
  Eigen::MatrixXd values;
  double epsilon = 0.0;
  int iterations_run = 0;
  // Max absolute deviation of the row and column sums of `values` from the
  // uniform targets.
  double marginal_error = 0.0;
  Eigen::VectorXd row_potential;
  Eigen::VectorXd col_potential;
};

struct SinkhornOptions {
  double epsilon = 1e-3;
  int max_iters = 200;
  double tolerance = 1e-9;
  // Anneal epsilon geometrically from the cost range down to `epsilon` over
  // the first half of the iteration budget, warm-starting the potentials.
  bool epsilon_scaling = true;
  // Iterations at the end of the budget spent on damped Newton steps for the
  // column potential (rows kept exact). 0 gives plain Sinkhorn.
  int newton_steps = 40;
};

// C_ij = |a_i - e_j|^2 + |a_min(i+k, Ta-1) - e_min(j+k, Te-1)|^2 (0-based),
// rows of the inputs being per-step intents. Throws InputError on empty
// inputs, mismatched dimensions or k < 1.
CostMatrix BuildCostMatrix(const Eigen::MatrixXd& agent_intents,
                           const Eigen::MatrixXd& expert_intents, int k);

// 0-based column of the first-row minimum, ties to the smallest index.
int TailIndex(const CostMatrix& cost);

// Entropic OT with uniform marginals (1/rows, 1/cols), solved with
// log-domain Sinkhorn plus a Newton refinement. Stops after max_iters or once the marginal error at
// the target epsilon is <= tolerance. Throws InputError on bad options and
// NumericalError on a non-finite dual.
TransportPlan Sinkhorn(const Eigen::MatrixXd& cost,
                       const SinkhornOptions& options = {});

// Frobenius inner product; throws InputError on shape mismatch.
double TransportCost(const Eigen::MatrixXd& plan, const Eigen::MatrixXd& cost);

struct ExactOtResult {
  double value = 0.0;
  std::vector<int> permutation;  // row i -> column permutation[i]
  Eigen::MatrixXd plan;
};

// Exhaustive assignment search over all n! permutations for an n x n cost
// with n <= 8, returning (1/n) sum_i C_{i, sigma(i)}. Ties keep the
// lexicographically first permutation. Throws InputError otherwise.
ExactOtResult ExactOtBruteForce(const Eigen::MatrixXd& cost);

// Debug dump: "kind,i,j,value" rows for cost, plan and both potentials.
std::string TransportDebugCsv(const Eigen::MatrixXd& cost,
                              const TransportPlan& plan);

}  // namespace ailot

#endif  // AILOT_OT_H_
