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

#include "ailot/dataset.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ailot/checksum.h"
#include "ailot/error.h"
#include "json.hpp"

namespace ailot {
namespace {

using nlohmann::json;

void Fail(std::size_t index, const std::string& what) {
  throw ValidationError("trajectory " + std::to_string(index) + ": " + what);
}

json HeaderToJson(const DatasetMetadata& m) {
  json header = {{"env", m.env},
                 {"n_states", m.n_states},
                 {"seed", m.seed},
                 {"expert", m.expert},
                 {"version", m.version}};
  if (m.goal) header["goal"] = *m.goal;
  if (m.goal_reached_fraction) {
    header["goal_reached_fraction"] = *m.goal_reached_fraction;
  }
  return header;
}

json TrajectoryToJson(const Trajectory& t) {
  json line = {{"states", t.states}};
  if (t.actions) line["actions"] = *t.actions;
  if (t.rewards) line["rewards"] = *t.rewards;
  return line;
}

}  // namespace

double Trajectory::Return() const {
  if (!rewards) return 0.0;
  return std::accumulate(rewards->begin(), rewards->end(), 0.0);
}

void ValidateDataset(const Dataset& dataset) {
  const auto& m = dataset.metadata;
  if (m.version != kDatasetVersion) {
    throw VersionError("unsupported dataset version " +
                       std::to_string(m.version));
  }
  if (m.n_states <= 0) throw ValidationError("n_states must be positive");
  if (m.goal && (*m.goal < 0 || *m.goal >= m.n_states)) {
    throw ValidationError("goal out of range");
  }
  for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
    const Trajectory& t = dataset.trajectories[i];
    if (t.states.empty()) Fail(i, "no states");
    for (int s : t.states) {
      if (s < 0 || s >= m.n_states) Fail(i, "state id out of range");
    }
    if (t.actions && t.actions->size() + 1 != t.states.size()) {
      Fail(i, "expected " + std::to_string(t.states.size() - 1) +
                  " actions, got " + std::to_string(t.actions->size()));
    }
    if (t.actions) {
      for (int a : *t.actions) {
        if (a < 0) Fail(i, "negative action id");
      }
    }
    if (t.rewards) {
      if (t.rewards->size() != t.states.size()) {
        Fail(i, "expected " + std::to_string(t.states.size()) +
                    " rewards, got " + std::to_string(t.rewards->size()));
      }
      for (double r : *t.rewards) {
        if (!std::isfinite(r)) Fail(i, "non-finite reward");
      }
    }
    if (m.expert && (t.actions || t.rewards)) {
      Fail(i, "expert trajectories carry no actions or rewards");
    }
  }
}

std::string SerializeDataset(const Dataset& dataset) {
  ValidateDataset(dataset);
  std::string out = HeaderToJson(dataset.metadata).dump();
  out.push_back('\n');
  for (const Trajectory& t : dataset.trajectories) {
    out += TrajectoryToJson(t).dump();
    out.push_back('\n');
  }
  return out;
}

Dataset ParseDataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  Dataset dataset;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json value;
    try {
      value = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(e.what(), line_no);
    }
    try {
      if (!have_header) {
        DatasetMetadata& m = dataset.metadata;
        m.version = value.at("version").get<int>();
        if (m.version != kDatasetVersion) {
          throw VersionError("line " + std::to_string(line_no) +
                             ": unsupported dataset version " +
                             std::to_string(m.version));
        }
        m.env = value.at("env").get<std::string>();
        m.n_states = value.at("n_states").get<int>();
        m.seed = value.at("seed").get<std::uint64_t>();
        m.expert = value.at("expert").get<bool>();
        if (value.contains("goal")) m.goal = value["goal"].get<int>();
        if (value.contains("goal_reached_fraction")) {
          m.goal_reached_fraction =
              value["goal_reached_fraction"].get<double>();
        }
        have_header = true;
        continue;
      }
      Trajectory t;
      t.states = value.at("states").get<std::vector<int>>();
      if (value.contains("actions")) {
        t.actions = value["actions"].get<std::vector<int>>();
      }
      if (value.contains("rewards")) {
        t.rewards = value["rewards"].get<std::vector<double>>();
      }
      dataset.trajectories.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!have_header) throw ParseError("missing header line", 0);
  ValidateDataset(dataset);
  return dataset;
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path) {
  WriteFileAtomic(path, SerializeDataset(dataset));
}

Dataset LoadDataset(const std::filesystem::path& path) {
  return ParseDataset(ReadFile(path));
}

Dataset StripLabels(const Dataset& dataset, bool drop_actions,
                    bool drop_rewards) {
  Dataset out = dataset;
  for (Trajectory& t : out.trajectories) {
    if (drop_actions) t.actions.reset();
    if (drop_rewards) t.rewards.reset();
  }
  return out;
}

Dataset SelectExpertTrajectories(const Dataset& dataset, int k,
                                 SelectionCriterion criterion) {
  if (k < 1) throw InputError("K must be >= 1");
  if (criterion == SelectionCriterion::kReachedGoal &&
      !dataset.metadata.goal) {
    throw InputError("reached-goal selection needs a goal in the metadata");
  }
  std::vector<std::size_t> qualifying;
  for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
    const Trajectory& t = dataset.trajectories[i];
    const bool ok = criterion == SelectionCriterion::kReachedGoal
                        ? t.states.back() == *dataset.metadata.goal
                        : t.rewards.has_value();
    if (ok) qualifying.push_back(i);
  }
  if (static_cast<int>(qualifying.size()) < k) {
    throw SelectionError(static_cast<int>(qualifying.size()), k);
  }
  std::vector<double> returns(dataset.trajectories.size());
  for (std::size_t i : qualifying) returns[i] = dataset.trajectories[i].Return();
  std::stable_sort(qualifying.begin(), qualifying.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (returns[a] != returns[b]) return returns[a] > returns[b];
                     const int la = dataset.trajectories[a].size();
                     const int lb = dataset.trajectories[b].size();
                     if (la != lb) return la < lb;
                     return a < b;
                   });
  Dataset out;
  out.metadata = dataset.metadata;
  for (int i = 0; i < k; ++i) {
    out.trajectories.push_back(dataset.trajectories[qualifying[i]]);
  }
  return out;
}

}  // namespace ailot
