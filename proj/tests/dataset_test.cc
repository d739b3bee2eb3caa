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


#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "ailot/dataset.h"
#include "ailot/error.h"

namespace ailot {
namespace {

namespace fs = std::filesystem;

Dataset TwoTrajectories() {
  Dataset d;
  d.metadata = {"grid", 9, 42, false};
  d.trajectories.push_back({{0, 1, 2}, std::vector<int>{3, 3}, std::nullopt});
  d.trajectories.push_back(
      {{4, 5}, std::vector<int>{1}, std::vector<double>{0.25, -1.5}});
  return d;
}

fs::path TempFile(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ailot_dataset_test";
  fs::create_directories(dir);
  return dir / name;
}

// Random valid datasets for the round-trip property.
Dataset RandomDataset(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> n_states_dist(1, 30);
  std::uniform_int_distribution<int> n_traj_dist(0, 6);
  std::uniform_int_distribution<int> len_dist(1, 12);
  std::uniform_real_distribution<double> reward_dist(-1e6, 1e6);
  std::bernoulli_distribution coin(0.5);
  Dataset d;
  d.metadata.env = "env" + std::to_string(gen() % 100);
  d.metadata.n_states = n_states_dist(gen);
  d.metadata.seed = gen();
  d.metadata.expert = coin(gen);
  if (coin(gen)) d.metadata.goal = static_cast<int>(gen() % d.metadata.n_states);
  if (coin(gen)) d.metadata.goal_reached_fraction = reward_dist(gen) * 1e-6;
  const int n = n_traj_dist(gen);
  for (int i = 0; i < n; ++i) {
    Trajectory t;
    const int len = len_dist(gen);
    for (int k = 0; k < len; ++k) {
      t.states.push_back(static_cast<int>(gen() % d.metadata.n_states));
    }
    if (!d.metadata.expert) {
      if (coin(gen)) {
        t.actions.emplace();
        for (int k = 0; k + 1 < len; ++k) {
          t.actions->push_back(static_cast<int>(gen() % 4));
        }
      }
      if (coin(gen)) {
        t.rewards.emplace();
        for (int k = 0; k < len; ++k) t.rewards->push_back(reward_dist(gen));
      }
    }
    d.trajectories.push_back(std::move(t));
  }
  return d;
}

TEST(DatasetFormat, HeaderPlusOneLinePerTrajectory) {
  const std::string text = SerializeDataset(TwoTrajectories());
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_NE(text.find("\"version\":1"), std::string::npos);
  EXPECT_NE(text.find("\"expert\":false"), std::string::npos);
}

TEST(DatasetFormat, SaveLoadRoundTrip) {
  const Dataset d = TwoTrajectories();
  const fs::path path = TempFile("roundtrip.jsonl");
  SaveDataset(d, path);
  EXPECT_EQ(LoadDataset(path), d);
}

TEST(DatasetFormat, RoundTripProperty) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const Dataset d = RandomDataset(gen);
    ASSERT_EQ(ParseDataset(SerializeDataset(d)), d) << "trial " << trial;
  }
}

TEST(DatasetFormat, WrongActionLengthNamesTrajectory) {
  const std::string text =
      "{\"env\":\"g\",\"n_states\":4,\"seed\":0,\"expert\":false,\"version\":1}\n"
      "{\"states\":[0,1]}\n"
      "{\"states\":[0,1,2],\"actions\":[0,0,0]}\n";
  try {
    ParseDataset(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("trajectory 1"), std::string::npos)
        << e.what();
  }
}

TEST(DatasetFormat, MalformedLineReportsLineNumber) {
  const std::string text =
      "{\"env\":\"g\",\"n_states\":4,\"seed\":0,\"expert\":false,\"version\":1}\n"
      "{\"states\":[0,1]}\n"
      "{\"states\":[0,1\n";
  try {
    ParseDataset(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(DatasetFormat, MissingFieldIsParseError) {
  EXPECT_THROW(ParseDataset("{\"env\":\"g\",\"version\":1}\n"), ParseError);
  EXPECT_THROW(ParseDataset(""), ParseError);
}

TEST(DatasetFormat, VersionMismatch) {
  EXPECT_THROW(
      ParseDataset("{\"env\":\"g\",\"n_states\":4,\"seed\":0,\"expert\":false,"
                   "\"version\":2}\n"),
      VersionError);
}

TEST(DatasetFormat, LoadMissingFileIsIoError) {
  EXPECT_THROW(LoadDataset(TempFile("does_not_exist.jsonl")), IoError);
}

TEST(DatasetValidate, RejectsDocumentedCases) {
  Dataset d = TwoTrajectories();
  EXPECT_NO_THROW(ValidateDataset(d));

  Dataset bad = d;
  bad.trajectories[0].states[1] = 9;
  EXPECT_THROW(ValidateDataset(bad), ValidationError);

  bad = d;
  bad.trajectories[1].rewards->push_back(1.0);
  EXPECT_THROW(ValidateDataset(bad), ValidationError);

  bad = d;
  (*bad.trajectories[1].rewards)[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(ValidateDataset(bad), ValidationError);

  bad = d;
  bad.trajectories[0].states.clear();
  bad.trajectories[0].actions.reset();
  EXPECT_THROW(ValidateDataset(bad), ValidationError);

  bad = d;
  bad.metadata.expert = true;
  EXPECT_THROW(ValidateDataset(bad), ValidationError);
  EXPECT_NO_THROW(ValidateDataset(StripLabels(bad, true, true)));
}

TEST(StripLabels, DropsRewardsOnly) {
  const Dataset d = TwoTrajectories();
  const Dataset s = StripLabels(d, false, true);
  ASSERT_EQ(s.trajectories.size(), d.trajectories.size());
  for (std::size_t i = 0; i < d.trajectories.size(); ++i) {
    EXPECT_EQ(s.trajectories[i].states, d.trajectories[i].states);
    EXPECT_EQ(s.trajectories[i].actions, d.trajectories[i].actions);
    EXPECT_FALSE(s.trajectories[i].rewards.has_value());
  }
}

TEST(StripLabels, IdempotentOnBareData) {
  const Dataset bare = StripLabels(TwoTrajectories(), true, true);
  EXPECT_EQ(StripLabels(bare, true, true), bare);
  const std::string text = SerializeDataset(bare);
  EXPECT_EQ(text.find("actions"), std::string::npos);
  EXPECT_EQ(text.find("rewards"), std::string::npos);
}

Dataset TenRollouts() {
  // Goal 9; trajectories 2, 5 and 7 reach it with lengths 4, 3 and 3.
  Dataset d;
  d.metadata = {"grid", 10, 0, false};
  d.metadata.goal = 9;
  for (int i = 0; i < 10; ++i) d.trajectories.push_back({{0, 1, 2, 3}});
  d.trajectories[2].states = {0, 1, 2, 9};
  d.trajectories[5].states = {0, 4, 9};
  d.trajectories[7].states = {1, 4, 9};
  return d;
}

TEST(SelectExperts, ShortestGoalReachingFirst) {
  const Dataset picked =
      SelectExpertTrajectories(TenRollouts(), 1, SelectionCriterion::kReachedGoal);
  ASSERT_EQ(picked.trajectories.size(), 1u);
  EXPECT_EQ(picked.trajectories[0].states, (std::vector<int>{0, 4, 9}));
}

TEST(SelectExperts, OrderIsReturnLengthIndex) {
  const Dataset picked =
      SelectExpertTrajectories(TenRollouts(), 3, SelectionCriterion::kReachedGoal);
  ASSERT_EQ(picked.trajectories.size(), 3u);
  EXPECT_EQ(picked.trajectories[0].states, (std::vector<int>{0, 4, 9}));
  EXPECT_EQ(picked.trajectories[1].states, (std::vector<int>{1, 4, 9}));
  EXPECT_EQ(picked.trajectories[2].states, (std::vector<int>{0, 1, 2, 9}));
}

TEST(SelectExperts, TooFewReportsCount) {
  try {
    SelectExpertTrajectories(TenRollouts(), 5, SelectionCriterion::kReachedGoal);
    FAIL() << "expected SelectionError";
  } catch (const SelectionError& e) {
    EXPECT_EQ(std::string(e.what()), "found 3, need 5");
    EXPECT_EQ(e.found(), 3);
  }
}

TEST(SelectExperts, TopReturnUsesRewards) {
  Dataset d;
  d.metadata = {"grid", 4, 0, false};
  d.trajectories.push_back({{0, 1}, std::nullopt, std::vector<double>{1, 1}});
  d.trajectories.push_back({{0, 1, 2}, std::nullopt, std::vector<double>{1, 1, 3}});
  d.trajectories.push_back({{3}, std::nullopt, std::nullopt});
  const Dataset picked =
      SelectExpertTrajectories(d, 2, SelectionCriterion::kTopReturn);
  EXPECT_EQ(picked.trajectories[0].states, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(picked.trajectories[1].states, (std::vector<int>{0, 1}));
  EXPECT_THROW(SelectExpertTrajectories(d, 3, SelectionCriterion::kTopReturn),
               SelectionError);
}

TEST(SelectExperts, RejectsUncomputableCriterion) {
  Dataset d = TenRollouts();
  d.metadata.goal.reset();
  EXPECT_THROW(SelectExpertTrajectories(d, 1, SelectionCriterion::kReachedGoal),
               InputError);
  EXPECT_THROW(
      SelectExpertTrajectories(TenRollouts(), 0, SelectionCriterion::kReachedGoal),
      InputError);
}

}  // namespace
}  // namespace ailot
