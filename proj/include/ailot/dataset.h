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

#ifndef AILOT_DATASET_H_
#define AILOT_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ailot {

inline constexpr int kDatasetVersion = 1;

// A sequence of T >= 1 states. Actions, when present, number T - 1 (one per
// transition); rewards, when present, number T (one per state).
struct Trajectory {
  std::vector<int> states;
  std::optional<std::vector<int>> actions;
  std::optional<std::vector<double>> rewards;

  int size() const { return static_cast<int>(states.size()); }
  double Return() const;

  bool operator==(const Trajectory&) const = default;
};

struct DatasetMetadata {
  std::string env;
  int n_states = 0;
  std::uint64_t seed = 0;
  bool expert = false;
  int version = kDatasetVersion;
  // Absorbing goal state of the generating environment, when known.
  std::optional<int> goal;
  std::optional<double> goal_reached_fraction;

  bool operator==(const DatasetMetadata&) const = default;
};

struct Dataset {
  DatasetMetadata metadata;
  std::vector<Trajectory> trajectories;

  bool operator==(const Dataset&) const = default;
};

// Throws ValidationError naming the first offending trajectory index.
void ValidateDataset(const Dataset& dataset);

// Line-delimited JSON: one metadata header line, then one trajectory per
// line. Both validate; Load throws ParseError (with line number),
// VersionError, ValidationError or IoError.
void SaveDataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset LoadDataset(const std::filesystem::path& path);
std::string SerializeDataset(const Dataset& dataset);
Dataset ParseDataset(const std::string& text);

Dataset StripLabels(const Dataset& dataset, bool drop_actions,
                    bool drop_rewards);

enum class SelectionCriterion { kReachedGoal, kTopReturn };

// Filters by `criterion`, orders by (return desc, length asc, index asc) and
// keeps the first k. A trajectory without rewards has return 0. Throws
// SelectionError when fewer than k qualify, InputError when k < 1 or the
// criterion cannot be evaluated.
Dataset SelectExpertTrajectories(const Dataset& dataset, int k,
                                 SelectionCriterion criterion);

}  // namespace ailot

#endif  // AILOT_DATASET_H_
