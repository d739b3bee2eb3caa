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


// Independent reference implementations used by the tests. None of them
// calls into the library's solvers.

#ifndef AILOT_TESTS_ORACLES_H_
#define AILOT_TESTS_ORACLES_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Minimum of sum_i C(i, sigma(i)) over permutations (Hungarian method,
// shortest augmenting paths). Returns the total, not the mean.
double AssignmentMinSum(const Eigen::MatrixXd& cost,
                        std::vector<int>* sigma = nullptr);

// Exact OT value with uniform marginals 1/n and 1/m. Rows and columns are
// replicated to lcm(n, m) and solved as an assignment.
double UniformOtValue(const Eigen::MatrixXd& cost);

// Parsed grid text, independent of the library parser.
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<bool> wall;
  int goal = -1;
  std::vector<int> starts;
  int max_len = 0;
};
Grid ParseGrid(const std::string& text);

// Step counts to the goal, -1 when unreachable or a wall.
std::vector<int> BfsToGoal(const Grid& grid);

// Deterministic grid move: 0 up, 1 down, 2 left, 3 right.
int GridMove(const Grid& grid, int state, int action);

// Monte-Carlo success fraction of a state -> action-distribution policy.
double SimulateSuccess(const Grid& grid,
                       const std::function<std::vector<double>(int)>& policy,
                       int episodes, std::uint64_t seed);

// Deterministic-MDP value iteration with arrival rewards r(s') and a
// terminal goal: Q(s,a) = r(s') + gamma * max_b Q(s',b), or
// goal_scale * r(goal) when s' is the goal.
Eigen::MatrixXd ValueIteration(int n_states, int n_actions,
                               const std::function<int(int, int)>& next,
                               const std::vector<double>& arrival_reward,
                               int goal, double gamma, int sweeps,
                               double goal_scale = 1.0);

// Reward r_i = alpha exp(-tau T_a sum_j P_ij C_ij), summed column by column
// from the last column.
std::vector<double> DirectRewards(const Eigen::MatrixXd& plan,
                                  const Eigen::MatrixXd& cost, int agent_length,
                                  double alpha, double tau);

double Pearson(const std::vector<double>& x, const std::vector<double>& y);

// Upper tail P(X > stat) of a chi-squared variable.
double ChiSquaredSurvival(double stat, double dof);

}  // namespace oracle

#endif  // AILOT_TESTS_ORACLES_H_
