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

#include "ailot/relabel.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "ailot/checksum.h"
#include "ailot/error.h"
#include "json.hpp"

namespace ailot {

void RelabelConfig::Validate() const {
  if (!(alpha > 0.0)) throw InputError("alpha must be positive");
  if (!(tau > 0.0)) throw InputError("tau must be positive");
  if (k < 1) throw InputError("k must be >= 1");
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (max_iters < 1) throw InputError("max_iters must be >= 1");
  if (!(tolerance > 0.0)) throw InputError("tolerance must be positive");
  if (threads < 1) throw InputError("threads must be >= 1");
}

SinkhornOptions RelabelConfig::Sinkhorn() const {
  SinkhornOptions options;
  options.epsilon = epsilon;
  options.max_iters = max_iters;
  options.tolerance = tolerance;
  return options;
}

std::string ToString(Aggregator aggregator) {
  return aggregator == Aggregator::kMax ? "max" : "min";
}

std::string ToString(RescaleMode mode) {
  switch (mode) {
    case RescaleMode::kNone:
      return "none";
    case RescaleMode::kIqlRange:
      return "iql-range";
    case RescaleMode::kIqlRangeMinusOne:
      return "iql-range-minus-one";
  }
  return "none";
}

Aggregator ParseAggregator(const std::string& text) {
  if (text == "max") return Aggregator::kMax;
  if (text == "min") return Aggregator::kMin;
  throw InputError("unknown aggregator '" + text + "'");
}

RescaleMode ParseRescaleMode(const std::string& text) {
  if (text == "none") return RescaleMode::kNone;
  if (text == "iql-range") return RescaleMode::kIqlRange;
  if (text == "iql-range-minus-one") return RescaleMode::kIqlRangeMinusOne;
  throw InputError("unknown rescale mode '" + text + "'");
}

std::vector<double> RewardFromPlan(const Eigen::MatrixXd& plan,
                                   const Eigen::MatrixXd& cost_tail,
                                   int agent_length, double alpha, double tau) {
  if (plan.rows() != cost_tail.rows() || plan.cols() != cost_tail.cols()) {
    throw InputError("plan and cost shapes differ");
  }
  if (agent_length != plan.rows()) {
    throw InputError("agent length does not match plan rows");
  }
  std::vector<double> rewards(static_cast<std::size_t>(agent_length));
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    const double row_cost = plan.row(i).dot(cost_tail.row(i));
    rewards[i] = alpha * std::exp(-tau * agent_length * row_cost);
  }
  return rewards;
}

PairAlignment RelabelPair(const std::vector<int>& agent_states,
                          const std::vector<int>& expert_states,
                          const IntentModel& model,
                          const RelabelConfig& config) {
  if (agent_states.empty() || expert_states.empty()) {
    throw InputError("trajectories must be nonempty");
  }
  const CostMatrix cost = BuildCostMatrix(EmbedAll(model, agent_states),
                                          EmbedAll(model, expert_states),
                                          config.k);
  PairAlignment out;
  out.tail_start = TailIndex(cost);
  const Eigen::MatrixXd tail =
      cost.values.rightCols(cost.values.cols() - out.tail_start);
  const TransportPlan plan = Sinkhorn(tail, config.Sinkhorn());
  out.rewards = RewardFromPlan(plan.values, tail,
                               static_cast<int>(agent_states.size()),
                               config.alpha, config.tau);
  out.transport_cost = TransportCost(plan.values, tail);
  out.iterations_run = plan.iterations_run;
  out.marginal_error = plan.marginal_error;
  return out;
}

namespace {

struct AgentResult {
  std::vector<double> rewards;
  TrajectoryProvenance provenance;
};

AgentResult RelabelOne(const Trajectory& agent, const Dataset& expert,
                       const IntentModel& model, const RelabelConfig& config) {
  AgentResult result;
  double best_sum = 0.0;
  for (std::size_t e = 0; e < expert.trajectories.size(); ++e) {
    PairAlignment pair = RelabelPair(
        agent.states, expert.trajectories[e].states, model, config);
    const double sum =
        std::accumulate(pair.rewards.begin(), pair.rewards.end(), 0.0);
    if (e == 0) {
      result.rewards = pair.rewards;
      best_sum = sum;
    } else {
      for (std::size_t i = 0; i < result.rewards.size(); ++i) {
        result.rewards[i] = config.aggregator == Aggregator::kMax
                                ? std::max(result.rewards[i], pair.rewards[i])
                                : std::min(result.rewards[i], pair.rewards[i]);
      }
      const bool better = config.aggregator == Aggregator::kMax
                              ? sum > best_sum
                              : sum < best_sum;
      if (better) {
        best_sum = sum;
        result.provenance.chosen_expert = static_cast<int>(e);
      }
    }
    pair.rewards.clear();
    result.provenance.per_expert.push_back(std::move(pair));
  }
  return result;
}

}  // namespace

RelabeledDataset RelabelDataset(const Dataset& agent, const Dataset& expert,
                                const IntentModel& model,
                                const RelabelConfig& config) {
  config.Validate();
  if (expert.trajectories.empty()) throw InputError("empty expert dataset");
  if (agent.metadata.n_states != model.n_states ||
      expert.metadata.n_states != model.n_states) {
    throw InputError("datasets and intent model disagree on n_states");
  }

  const std::size_t n = agent.trajectories.size();
  std::vector<AgentResult> results(n);
  const auto worker = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < n; i += stride) {
      results[i] = RelabelOne(agent.trajectories[i], expert, model, config);
    }
  };
  const auto threads = static_cast<std::size_t>(config.threads);
  if (threads <= 1 || n <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
          try {
            worker(w, threads);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  RelabeledDataset out;
  out.dataset = agent;
  out.dataset.metadata.expert = false;
  for (std::size_t i = 0; i < n; ++i) {
    out.dataset.trajectories[i].rewards = std::move(results[i].rewards);
    out.provenance.push_back(std::move(results[i].provenance));
  }
  return RescaleRewards(out, config.rescale);
}

RelabeledDataset RescaleRewards(const RelabeledDataset& relabeled,
                                RescaleMode mode) {
  if (mode == RescaleMode::kNone) return relabeled;
  RelabeledDataset out = relabeled;
  auto& trajectories = out.dataset.trajectories;
  if (trajectories.empty()) throw DegenerateRangeError("no trajectories");
  for (const Trajectory& t : trajectories) {
    if (!t.rewards) throw InputError("trajectory without rewards");
  }
  if (mode == RescaleMode::kIqlRangeMinusOne) {
    for (Trajectory& t : trajectories) {
      for (double& r : *t.rewards) r -= 1.0;
    }
  }
  double max_return = trajectories.front().Return();
  double min_return = max_return;
  for (const Trajectory& t : trajectories) {
    max_return = std::max(max_return, t.Return());
    min_return = std::min(min_return, t.Return());
  }
  if (max_return == min_return) {
    throw DegenerateRangeError("all trajectory returns equal " +
                               std::to_string(max_return));
  }
  const double scale = 1000.0 / (max_return - min_return);
  for (Trajectory& t : trajectories) {
    for (double& r : *t.rewards) r *= scale;
  }
  return out;
}

std::string SerializeProvenance(const RelabeledDataset& relabeled) {
  std::string out;
  for (std::size_t i = 0; i < relabeled.provenance.size(); ++i) {
    const TrajectoryProvenance& p = relabeled.provenance[i];
    nlohmann::json experts = nlohmann::json::array();
    for (const PairAlignment& a : p.per_expert) {
      experts.push_back({{"tail_start", a.tail_start},
                         {"transport_cost", a.transport_cost},
                         {"iterations_run", a.iterations_run},
                         {"marginal_error", a.marginal_error}});
    }
    const PairAlignment& chosen = p.per_expert.at(p.chosen_expert);
    nlohmann::json line = {{"trajectory", i},
                           {"chosen_expert", p.chosen_expert},
                           {"tail_start", chosen.tail_start},
                           {"transport_cost", chosen.transport_cost},
                           {"iterations_run", chosen.iterations_run},
                           {"experts", experts}};
    out += line.dump();
    out.push_back('\n');
  }
  return out;
}

void SaveProvenance(const RelabeledDataset& relabeled,
                    const std::filesystem::path& path) {
  WriteFileAtomic(path, SerializeProvenance(relabeled));
}

}  // namespace ailot
