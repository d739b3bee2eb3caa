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

#ifndef AILOT_ENV_H_
#define AILOT_ENV_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ailot/dataset.h"
#include "ailot/policy.h"

namespace ailot {

// Grid actions. The order is also the tie-break order of ExpertPolicy.
enum GridAction : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
// Chain actions.
enum ChainAction : int { kChainLeft = 0, kChainRight = 1 };

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

// Deterministic gridworld. States are row-major cell indices (y * width + x),
// with y = 0 the top row; "up" decreases y. Moving into a wall or off the grid
// leaves the state unchanged. The goal is absorbing.
class GridWorld {
 public:
  // Throws InputError when a cell is out of bounds or on a wall, or when some
  // start cell cannot reach the goal.
  GridWorld(int width, int height, std::vector<Cell> walls, Cell goal,
            std::vector<Cell> starts, int max_episode_len,
            std::string name = "grid");

  // Text format: first line "W H [max_episode_len]", then H rows over
  // {'.', '#', 'G', 'S'}. Exactly one 'G' and at least one 'S'.
  static GridWorld Parse(std::string_view text, std::string name = "grid");
  static GridWorld Load(const std::filesystem::path& path);

  int width() const { return width_; }
  int height() const { return height_; }
  int num_states() const { return width_ * height_; }
  int num_actions() const { return 4; }
  int goal() const { return goal_; }
  const std::vector<int>& starts() const { return starts_; }
  int max_episode_len() const { return max_episode_len_; }
  const std::string& name() const { return name_; }

  int StateOf(Cell cell) const { return cell.y * width_ + cell.x; }
  Cell CellOf(int state) const { return {state % width_, state / width_}; }
  bool IsWall(int state) const { return walls_[state]; }

  // Shortest-path step counts to the goal; -1 for walls and unreachable
  // cells.
  const std::vector<int>& goal_distances() const { return goal_distances_; }

 private:
  int width_;
  int height_;
  std::vector<bool> walls_;
  int goal_;
  std::vector<int> starts_;
  int max_episode_len_;
  std::string name_;
  std::vector<int> goal_distances_;
};

// Line of `length` states; starts at 0, goal at length - 1.
class ChainMDP {
 public:
  ChainMDP(int length, int max_episode_len);

  int length() const { return length_; }
  int num_states() const { return length_; }
  int num_actions() const { return 2; }
  int goal() const { return length_ - 1; }
  const std::vector<int>& starts() const { return starts_; }
  int max_episode_len() const { return max_episode_len_; }
  std::string name() const { return "chain" + std::to_string(length_); }

 private:
  int length_;
  int max_episode_len_;
  std::vector<int> starts_{0};
};

using Environment = std::variant<GridWorld, ChainMDP>;

struct StepResult {
  int next_state = 0;
  bool done = false;
  bool operator==(const StepResult&) const = default;
};

int NumStates(const Environment& env);
int NumActions(const Environment& env);
int GoalState(const Environment& env);
const std::vector<int>& StartStates(const Environment& env);
int MaxEpisodeLen(const Environment& env);
std::string EnvName(const Environment& env);

// `done` is set when the next state is the goal; the episode budget is the
// caller's to track. Throws InputError on an invalid state or action.
StepResult Step(const Environment& env, int state, int action);

// Greedy descent of the BFS distance table, ties broken in GridAction order.
// Walls and the goal map to kUp, which is a no-op at the absorbing goal.
Policy ExpertPolicy(const GridWorld& env);
Policy ExpertPolicy(const ChainMDP& env);

// Rolls out `n_episodes` episodes, episode e seeded with seed + e. Each
// episode starts at a uniformly drawn start state and stops at the goal or
// after max_episode_len actions. Actions are recorded; the metadata records
// the goal and the goal-reaching fraction.
Dataset Rollout(const Environment& env, const Policy& policy,
                std::uint64_t seed, int n_episodes);
Dataset RolloutRandom(const Environment& env, std::uint64_t seed,
                      int n_episodes);

}  // namespace ailot

#endif  // AILOT_ENV_H_
