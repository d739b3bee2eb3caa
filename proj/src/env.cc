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

#include "ailot/env.h"

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <sstream>
#include <utility>

#include "ailot/checksum.h"
#include "ailot/error.h"
#include "ailot/rng.h"

namespace ailot {
namespace {

constexpr int kDx[4] = {0, 0, -1, 1};
constexpr int kDy[4] = {-1, 1, 0, 0};

int DefaultMaxEpisodeLen(int width, int height) { return 4 * width * height; }

}  // namespace

Policy Policy::Uniform(int n_states, int n_actions) {
  Policy policy;
  policy.n_actions = n_actions;
  policy.greedy.assign(n_states, 0);
  policy.probabilities =
      Eigen::MatrixXd::Constant(n_states, n_actions, 1.0 / n_actions);
  return policy;
}

bool Policy::operator==(const Policy& other) const {
  if (n_actions != other.n_actions || greedy != other.greedy) return false;
  if (probabilities.has_value() != other.probabilities.has_value()) {
    return false;
  }
  return !probabilities || *probabilities == *other.probabilities;
}

GridWorld::GridWorld(int width, int height, std::vector<Cell> walls, Cell goal,
                     std::vector<Cell> starts, int max_episode_len,
                     std::string name)
    : width_(width),
      height_(height),
      max_episode_len_(max_episode_len),
      name_(std::move(name)) {
  if (width <= 0 || height <= 0) throw InputError("grid size must be positive");
  if (max_episode_len <= 0) {
    throw InputError("max_episode_len must be positive");
  }
  auto in_bounds = [&](Cell c) {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  };
  walls_.assign(width * height, false);
  for (Cell w : walls) {
    if (!in_bounds(w)) throw InputError("wall out of bounds");
    walls_[StateOf(w)] = true;
  }
  if (!in_bounds(goal) || walls_[StateOf(goal)]) {
    throw InputError("goal must be an in-bounds free cell");
  }
  goal_ = StateOf(goal);
  if (starts.empty()) throw InputError("at least one start cell required");
  for (Cell s : starts) {
    if (!in_bounds(s) || walls_[StateOf(s)]) {
      throw InputError("start cells must be in-bounds free cells");
    }
    starts_.push_back(StateOf(s));
  }

  goal_distances_.assign(num_states(), -1);
  goal_distances_[goal_] = 0;
  std::deque<int> frontier{goal_};
  while (!frontier.empty()) {
    const int state = frontier.front();
    frontier.pop_front();
    const Cell c = CellOf(state);
    for (int a = 0; a < 4; ++a) {
      const Cell n{c.x + kDx[a], c.y + kDy[a]};
      if (!in_bounds(n)) continue;
      const int ns = StateOf(n);
      if (walls_[ns] || goal_distances_[ns] >= 0) continue;
      goal_distances_[ns] = goal_distances_[state] + 1;
      frontier.push_back(ns);
    }
  }
  for (int s : starts_) {
    if (goal_distances_[s] < 0) {
      throw InputError("goal unreachable from start cell " + std::to_string(s));
    }
  }
}

GridWorld GridWorld::Parse(std::string_view text, std::string name) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty grid file", 1);
  std::istringstream header(line);
  int width = 0;
  int height = 0;
  if (!(header >> width >> height) || width <= 0 || height <= 0) {
    throw ParseError("expected \"W H [max_episode_len]\"", 1);
  }
  int max_len = DefaultMaxEpisodeLen(width, height);
  if (int value; header >> value) {
    if (value <= 0) throw ParseError("max_episode_len must be positive", 1);
    max_len = value;
  }
  std::vector<Cell> walls;
  std::vector<Cell> starts;
  std::optional<Cell> goal;
  for (int y = 0; y < height; ++y) {
    if (!std::getline(in, line)) throw ParseError("missing grid row", y + 2);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<int>(line.size()) != width) {
      throw ParseError("row width differs from W", y + 2);
    }
    for (int x = 0; x < width; ++x) {
      switch (line[x]) {
        case '.':
          break;
        case '#':
          walls.push_back({x, y});
          break;
        case 'S':
          starts.push_back({x, y});
          break;
        case 'G':
          if (goal) throw ParseError("more than one goal", y + 2);
          goal = Cell{x, y};
          break;
        default:
          throw ParseError("unexpected character", y + 2);
      }
    }
  }
  if (!goal) throw ParseError("no goal cell", 0);
  return GridWorld(width, height, std::move(walls), *goal, std::move(starts),
                   max_len, std::move(name));
}

GridWorld GridWorld::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path), path.stem().string());
}

ChainMDP::ChainMDP(int length, int max_episode_len)
    : length_(length), max_episode_len_(max_episode_len) {
  if (length < 2) throw InputError("chain length must be >= 2");
  if (max_episode_len <= 0) {
    throw InputError("max_episode_len must be positive");
  }
}

int NumStates(const Environment& env) {
  return std::visit([](const auto& e) { return e.num_states(); }, env);
}
int NumActions(const Environment& env) {
  return std::visit([](const auto& e) { return e.num_actions(); }, env);
}
int GoalState(const Environment& env) {
  return std::visit([](const auto& e) { return e.goal(); }, env);
}
const std::vector<int>& StartStates(const Environment& env) {
  return std::visit(
      [](const auto& e) -> const std::vector<int>& { return e.starts(); }, env);
}
int MaxEpisodeLen(const Environment& env) {
  return std::visit([](const auto& e) { return e.max_episode_len(); }, env);
}
std::string EnvName(const Environment& env) {
  return std::visit([](const auto& e) { return std::string(e.name()); }, env);
}

StepResult Step(const Environment& env, int state, int action) {
  if (state < 0 || state >= NumStates(env)) {
    throw InputError("invalid state " + std::to_string(state));
  }
  if (action < 0 || action >= NumActions(env)) {
    throw InputError("invalid action " + std::to_string(action));
  }
  int next = state;
  if (const auto* grid = std::get_if<GridWorld>(&env)) {
    if (grid->IsWall(state)) {
      throw InputError("state " + std::to_string(state) + " is a wall");
    }
    if (state != grid->goal()) {
      const Cell c = grid->CellOf(state);
      const Cell n{c.x + kDx[action], c.y + kDy[action]};
      if (n.x >= 0 && n.x < grid->width() && n.y >= 0 && n.y < grid->height() &&
          !grid->IsWall(grid->StateOf(n))) {
        next = grid->StateOf(n);
      }
    }
  } else {
    const auto& chain = std::get<ChainMDP>(env);
    if (state != chain.goal()) {
      next = action == kChainRight ? state + 1 : std::max(state - 1, 0);
    }
  }
  return {next, next == GoalState(env)};
}

Policy ExpertPolicy(const GridWorld& env) {
  Policy policy;
  policy.n_actions = env.num_actions();
  policy.greedy.assign(env.num_states(), kUp);
  const auto& dist = env.goal_distances();
  const Environment wrapped = env;
  for (int s = 0; s < env.num_states(); ++s) {
    if (s == env.goal() || env.IsWall(s) || dist[s] < 0) continue;
    for (int a = 0; a < 4; ++a) {
      const int next = Step(wrapped, s, a).next_state;
      if (next != s && dist[next] == dist[s] - 1) {
        policy.greedy[s] = a;
        break;
      }
    }
  }
  return policy;
}

Policy ExpertPolicy(const ChainMDP& env) {
  Policy policy;
  policy.n_actions = env.num_actions();
  policy.greedy.assign(env.num_states(), kChainRight);
  return policy;
}

namespace {

using ActionSource = std::function<int(int state, Rng& rng)>;

Dataset RolloutWith(const Environment& env, const ActionSource& act,
                    std::uint64_t seed, int n_episodes) {
  if (n_episodes < 1) throw InputError("n_episodes must be >= 1");
  Dataset dataset;
  dataset.metadata.env = EnvName(env);
  dataset.metadata.n_states = NumStates(env);
  dataset.metadata.seed = seed;
  dataset.metadata.goal = GoalState(env);
  const auto& starts = StartStates(env);
  int reached = 0;
  for (int e = 0; e < n_episodes; ++e) {
    Rng rng(seed + static_cast<std::uint64_t>(e));
    Trajectory traj;
    traj.actions.emplace();
    int state = starts[rng.UniformInt(starts.size())];
    traj.states.push_back(state);
    bool done = state == GoalState(env);
    for (int t = 0; t < MaxEpisodeLen(env) && !done; ++t) {
      const int action = act(state, rng);
      const StepResult result = Step(env, state, action);
      traj.actions->push_back(action);
      traj.states.push_back(result.next_state);
      state = result.next_state;
      done = result.done;
    }
    if (done) ++reached;
    dataset.trajectories.push_back(std::move(traj));
  }
  dataset.metadata.goal_reached_fraction =
      static_cast<double>(reached) / n_episodes;
  return dataset;
}

int SampleAction(const Eigen::MatrixXd& probabilities, int state, Rng& rng) {
  const double u = rng.Uniform();
  double cumulative = 0.0;
  const Eigen::Index n = probabilities.cols();
  for (Eigen::Index a = 0; a < n; ++a) {
    cumulative += probabilities(state, a);
    if (u < cumulative) return static_cast<int>(a);
  }
  return static_cast<int>(n - 1);
}

}  // namespace

Dataset Rollout(const Environment& env, const Policy& policy,
                std::uint64_t seed, int n_episodes) {
  if (static_cast<int>(policy.greedy.size()) != NumStates(env) ||
      policy.n_actions != NumActions(env)) {
    throw InputError("policy does not match environment");
  }
  if (policy.probabilities) {
    const Eigen::MatrixXd& probs = *policy.probabilities;
    return RolloutWith(
        env, [&](int s, Rng& rng) { return SampleAction(probs, s, rng); },
        seed, n_episodes);
  }
  return RolloutWith(
      env, [&](int s, Rng&) { return policy.greedy[s]; }, seed, n_episodes);
}

Dataset RolloutRandom(const Environment& env, std::uint64_t seed,
                      int n_episodes) {
  const auto n_actions = static_cast<std::uint64_t>(NumActions(env));
  return RolloutWith(
      env,
      [n_actions](int, Rng& rng) {
        return static_cast<int>(rng.UniformInt(n_actions));
      },
      seed, n_episodes);
}

}  // namespace ailot
