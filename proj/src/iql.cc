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

#include "ailot/iql.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "ailot/checksum.h"
#include "ailot/error.h"
#include "ailot/expectile.h"
#include "ailot/rng.h"
#include "json.hpp"

namespace ailot {
namespace {

// Per-entry accumulator of item updates within one step.
class EntryAccumulator {
 public:
  explicit EntryAccumulator(Eigen::Index size)
      : sum_(Eigen::VectorXd::Zero(size)), count_(size, 0) {}

  void Add(Eigen::Index entry, double delta) {
    if (count_[entry]++ == 0) touched_.push_back(entry);
    sum_(entry) += delta;
  }

  // data[entry] += lr * mean delta, then reset.
  void ApplyAndReset(double* data, double learning_rate) {
    for (Eigen::Index entry : touched_) {
      data[entry] += learning_rate * sum_(entry) / count_[entry];
      sum_(entry) = 0.0;
      count_[entry] = 0;
    }
    touched_.clear();
  }

 private:
  Eigen::VectorXd sum_;
  std::vector<int> count_;
  std::vector<Eigen::Index> touched_;
};

}  // namespace

void IqlConfig::Validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("gamma must be in (0,1]");
  if (!(expectile > 0.0 && expectile < 1.0)) {
    throw InputError("expectile must be in (0,1)");
  }
  if (!(temperature > 0.0)) throw InputError("temperature must be > 0");
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be > 0");
  if (steps < 0) throw InputError("steps must be >= 0");
  if (batch_size < 1) throw InputError("batch_size must be >= 1");
  if (absorbing_goal && gamma >= 1.0) {
    throw InputError("absorbing goal needs gamma < 1");
  }
}

std::vector<Transition> ExtractTransitions(const Dataset& dataset) {
  std::vector<Transition> transitions;
  const auto& goal = dataset.metadata.goal;
  for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
    const Trajectory& t = dataset.trajectories[i];
    if (!t.actions || !t.rewards) {
      throw InputError("trajectory " + std::to_string(i) +
                       " lacks actions or rewards");
    }
    for (int k = 0; k + 1 < t.size(); ++k) {
      const int next = t.states[k + 1];
      transitions.push_back({t.states[k], (*t.actions)[k], (*t.rewards)[k + 1],
                             next, goal.has_value() && next == *goal});
    }
  }
  return transitions;
}

namespace {

void CheckTransitions(const std::vector<Transition>& transitions, int n_states,
                      int n_actions) {
  for (const Transition& tr : transitions) {
    if (tr.s < 0 || tr.s >= n_states || tr.s_next < 0 ||
        tr.s_next >= n_states) {
      throw InputError("transition state out of range");
    }
    if (tr.a < 0 || tr.a >= n_actions) {
      throw InputError("transition action out of range");
    }
  }
}

}  // namespace

Eigen::VectorXd FitValueToQ(const Eigen::MatrixXd& q,
                            const std::vector<Transition>& transitions,
                            const IqlConfig& config) {
  config.Validate();
  CheckTransitions(transitions, static_cast<int>(q.rows()),
                   static_cast<int>(q.cols()));
  Eigen::VectorXd v = Eigen::VectorXd::Zero(q.rows());
  if (transitions.empty()) return v;
  Rng rng(config.seed);
  EntryAccumulator acc(v.size());
  for (int step = 0; step < config.steps; ++step) {
    for (int b = 0; b < config.batch_size; ++b) {
      const Transition& tr = transitions[rng.UniformInt(transitions.size())];
      const double diff = q(tr.s, tr.a) - v(tr.s);
      acc.Add(tr.s, ExpectileWeight(config.expectile, diff) * diff);
    }
    acc.ApplyAndReset(v.data(), config.learning_rate);
  }
  return v;
}

Policy ExtractPolicy(const IqlTables& tables,
                     const std::vector<Transition>& transitions,
                     double temperature) {
  const Eigen::Index n_states = tables.q.rows();
  const Eigen::Index n_actions = tables.q.cols();
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n_states, n_actions);
  for (const Transition& tr : transitions) counts(tr.s, tr.a) += 1.0;

  Policy policy;
  policy.n_actions = static_cast<int>(n_actions);
  policy.greedy.assign(static_cast<std::size_t>(n_states), 0);
  for (Eigen::Index s = 0; s < n_states; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < n_actions; ++a) {
      if (counts(s, a) == 0.0) continue;
      const double score = std::log(counts(s, a)) +
                           (tables.q(s, a) - tables.v(s)) / temperature;
      if (score > best) {
        best = score;
        policy.greedy[s] = static_cast<int>(a);
      }
    }
  }
  return policy;
}

IqlResult IqlTrain(const Dataset& dataset, int n_actions,
                   const IqlConfig& config) {
  config.Validate();
  if (n_actions < 1) throw InputError("n_actions must be >= 1");
  const std::vector<Transition> transitions = ExtractTransitions(dataset);
  const int n_states = dataset.metadata.n_states;
  CheckTransitions(transitions, n_states, n_actions);

  IqlResult result;
  result.tables.q = Eigen::MatrixXd::Zero(n_states, n_actions);
  result.tables.v = Eigen::VectorXd::Zero(n_states);
  if (config.steps == 0 || transitions.empty()) {
    result.policy.n_actions = n_actions;
    result.policy.greedy.assign(static_cast<std::size_t>(n_states), 0);
    return result;
  }

  Eigen::MatrixXd& q = result.tables.q;
  Eigen::VectorXd& v = result.tables.v;
  const double absorbing_scale =
      config.absorbing_goal ? 1.0 / (1.0 - config.gamma) : 1.0;
  Rng rng(config.seed);
  EntryAccumulator v_acc(v.size());
  EntryAccumulator q_acc(q.size());
  for (int step = 0; step < config.steps; ++step) {
    for (int b = 0; b < config.batch_size; ++b) {
      const Transition& tr = transitions[rng.UniformInt(transitions.size())];
      const double diff = q(tr.s, tr.a) - v(tr.s);
      v_acc.Add(tr.s, ExpectileWeight(config.expectile, diff) * diff);
      double target = tr.r + config.gamma * v(tr.s_next);
      if (tr.done) target = absorbing_scale * tr.r;
      // Column-major entry index of (s, a).
      q_acc.Add(tr.a * q.rows() + tr.s, target - q(tr.s, tr.a));
    }
    v_acc.ApplyAndReset(v.data(), config.learning_rate);
    q_acc.ApplyAndReset(q.data(), config.learning_rate);
  }
  if (!q.allFinite() || !v.allFinite()) {
    throw Error("IQL tables became non-finite");
  }
  result.policy = ExtractPolicy(result.tables, transitions, config.temperature);
  return result;
}

EvalResult Evaluate(const Policy& policy, const Environment& env,
                    int n_episodes, std::uint64_t seed) {
  if (n_episodes < 1) throw InputError("n_episodes must be >= 1");
  if (static_cast<int>(policy.greedy.size()) != NumStates(env) ||
      policy.n_actions != NumActions(env)) {
    throw InputError("policy does not match environment");
  }
  const auto& starts = StartStates(env);
  int successes = 0;
  long total_length = 0;
  for (int e = 0; e < n_episodes; ++e) {
    Rng rng(seed + static_cast<std::uint64_t>(e));
    int state = starts[rng.UniformInt(starts.size())];
    int length = 0;
    bool done = state == GoalState(env);
    while (!done && length < MaxEpisodeLen(env)) {
      int action = policy.greedy[state];
      if (policy.probabilities) {
        const double u = rng.Uniform();
        double cumulative = 0.0;
        action = policy.n_actions - 1;
        for (int a = 0; a < policy.n_actions; ++a) {
          cumulative += (*policy.probabilities)(state, a);
          if (u < cumulative) {
            action = a;
            break;
          }
        }
      }
      const StepResult r = Step(env, state, action);
      state = r.next_state;
      done = r.done;
      ++length;
    }
    if (done) ++successes;
    total_length += length;
  }
  EvalResult result;
  result.episodes = n_episodes;
  result.success_rate = static_cast<double>(successes) / n_episodes;
  result.mean_length = static_cast<double>(total_length) / n_episodes;
  return result;
}

std::string EvalCsv(const EvalResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "episodes,success_rate,mean_length\n"
      << result.episodes << ',' << result.success_rate << ','
      << result.mean_length << '\n';
  return out.str();
}

void SavePolicy(const IqlResult& result, const std::filesystem::path& path) {
  const auto& q = result.tables.q;
  std::vector<double> q_flat;
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    for (Eigen::Index a = 0; a < q.cols(); ++a) q_flat.push_back(q(s, a));
  }
  std::vector<double> v(result.tables.v.data(),
                        result.tables.v.data() + result.tables.v.size());
  nlohmann::json j = {{"n_states", q.rows()},
                      {"n_actions", q.cols()},
                      {"q", q_flat},
                      {"v", v},
                      {"greedy", result.policy.greedy}};
  WriteFileAtomic(path, j.dump() + "\n");
}

IqlResult LoadPolicy(const std::filesystem::path& path) {
  try {
    const auto j = nlohmann::json::parse(ReadFile(path));
    const int n_states = j.at("n_states").get<int>();
    const int n_actions = j.at("n_actions").get<int>();
    const auto q = j.at("q").get<std::vector<double>>();
    const auto v = j.at("v").get<std::vector<double>>();
    const auto greedy = j.at("greedy").get<std::vector<int>>();
    if (n_states < 1 || n_actions < 1 ||
        q.size() != static_cast<std::size_t>(n_states * n_actions) ||
        v.size() != static_cast<std::size_t>(n_states) ||
        greedy.size() != static_cast<std::size_t>(n_states)) {
      throw ValidationError("policy checkpoint arrays have wrong sizes");
    }
    IqlResult result;
    result.tables.q.resize(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) {
      for (int a = 0; a < n_actions; ++a) {
        result.tables.q(s, a) = q[static_cast<std::size_t>(s * n_actions + a)];
      }
    }
    result.tables.v = Eigen::Map<const Eigen::VectorXd>(v.data(), n_states);
    result.policy.n_actions = n_actions;
    result.policy.greedy = greedy;
    for (int a : greedy) {
      if (a < 0 || a >= n_actions) throw ValidationError("invalid action id");
    }
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("policy checkpoint: ") + e.what(), 0);
  }
}

}  // namespace ailot
