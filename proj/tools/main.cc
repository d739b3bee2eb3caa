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

// ailot: data generation, intent pretraining, relabeling, policy training,
// evaluation, diagnostics and sweeps.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ailot/checksum.h"
#include "ailot/dataset.h"
#include "ailot/env.h"
#include "ailot/error.h"
#include "ailot/intent.h"
#include "ailot/iql.h"
#include "ailot/ot.h"
#include "ailot/pipeline.h"
#include "ailot/relabel.h"
#include "ailot/rng.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// "chain:N" or a grid text file.
ailot::Environment LoadEnvironment(const std::string& where) {
  if (where.rfind("chain:", 0) == 0) {
    int length = 0;
    try {
      length = std::stoi(where.substr(6));
    } catch (const std::exception&) {
      throw ailot::UsageError("bad chain environment '" + where + "'");
    }
    if (length < 2) throw ailot::UsageError("chain length must be >= 2");
    return ailot::ChainMDP(length, 4 * length);
  }
  return ailot::GridWorld::Load(where);
}

// Config file first, then --set overrides in order, then dedicated flags.
struct ConfigFlags {
  std::string file;
  std::vector<std::string> sets;

  ailot::PipelineConfig Resolve() const {
    ailot::PipelineConfig config;
    if (!file.empty()) config.ApplyText(ailot::ReadFile(file));
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw ailot::UsageError("--set expects key=value, got '" + kv + "'");
      }
      config.Set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return config;
  }
};

void AddConfigFlags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.file, "key=value config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", flags.sets, "config override key=value")
      ->take_all();
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void WriteOtDebug(const ailot::Dataset& agent, const ailot::Dataset& expert,
                  const ailot::IntentModel& model,
                  const ailot::RelabelConfig& config, const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < agent.trajectories.size(); ++i) {
    const auto agent_z = ailot::EmbedAll(model, agent.trajectories[i].states);
    for (std::size_t j = 0; j < expert.trajectories.size(); ++j) {
      const auto expert_z =
          ailot::EmbedAll(model, expert.trajectories[j].states);
      const auto cost = ailot::BuildCostMatrix(agent_z, expert_z, config.k);
      const int j1 = ailot::TailIndex(cost);
      const Eigen::MatrixXd tail =
          cost.values.rightCols(cost.values.cols() - j1);
      const auto plan = ailot::Sinkhorn(tail, config.Sinkhorn());
      ailot::WriteFileAtomic(
          dir / ("ot_" + std::to_string(i) + "_" + std::to_string(j) + ".csv"),
          ailot::TransportDebugCsv(tail, plan));
    }
  }
}

int Run(int argc, char** argv) {
  CLI::App app{"ailot: intent-space optimal transport reward relabeling"};
  app.require_subcommand(1);

  // gen-data
  std::string gen_env, gen_policy = "random", gen_out;
  int gen_n = 1;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen-data", "roll out an environment");
  gen->add_option("--env", gen_env, "grid file or chain:N")->required();
  gen->add_option("--policy", gen_policy, "expert or random")
      ->check(CLI::IsMember({"expert", "random"}));
  gen->add_option("--n", gen_n, "episodes");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--out", gen_out, "dataset JSONL")->required();

  // train-intents
  std::string ti_data, ti_out;
  std::uint64_t ti_seed = 0;
  ConfigFlags ti_flags;
  auto* ti = app.add_subcommand("train-intents", "fit the intent model");
  ti->add_option("--data", ti_data, "agent dataset")->required();
  ti->add_option("--seed", ti_seed, "seed");
  ti->add_option("--out", ti_out, "intent checkpoint JSON")->required();
  AddConfigFlags(ti, ti_flags);

  // relabel
  std::string rl_agent, rl_expert, rl_intents, rl_out, rl_provenance,
      rl_debug;
  ConfigFlags rl_flags;
  auto* rl = app.add_subcommand("relabel", "OT reward relabeling");
  rl->add_option("--agent", rl_agent, "agent dataset")->required();
  rl->add_option("--expert", rl_expert, "expert dataset")->required();
  rl->add_option("--intents", rl_intents, "intent checkpoint")->required();
  rl->add_option("--out", rl_out, "relabeled dataset JSONL")->required();
  rl->add_option("--provenance", rl_provenance, "provenance JSONL");
  rl->add_option("--debug-ot", rl_debug,
                 "directory for per-pair cost/plan/dual CSVs");
  AddConfigFlags(rl, rl_flags);

  // train-policy
  std::string tp_data, tp_env, tp_out;
  std::uint64_t tp_seed = 0;
  ConfigFlags tp_flags;
  auto* tp = app.add_subcommand("train-policy", "tabular IQL");
  tp->add_option("--data", tp_data, "relabeled dataset")->required();
  tp->add_option("--env", tp_env, "grid file or chain:N")->required();
  tp->add_option("--seed", tp_seed, "seed");
  tp->add_option("--out", tp_out, "policy JSON")->required();
  AddConfigFlags(tp, tp_flags);

  // evaluate
  std::string ev_policy, ev_env, ev_out;
  int ev_episodes = 100;
  std::uint64_t ev_seed = 0;
  auto* ev = app.add_subcommand("evaluate", "greedy policy rollouts");
  ev->add_option("--policy", ev_policy, "policy JSON")->required();
  ev->add_option("--env", ev_env, "grid file or chain:N")->required();
  ev->add_option("--episodes", ev_episodes, "episodes");
  ev->add_option("--seed", ev_seed, "seed");
  ev->add_option("--out", ev_out, "evaluation CSV (stdout when omitted)");

  // pipeline
  std::string pl_agent, pl_expert, pl_env, pl_out, pl_aggregator;
  std::uint64_t pl_seed = 0;
  bool pl_dry_run = false;
  ConfigFlags pl_flags;
  auto* pl = app.add_subcommand("pipeline", "end-to-end run");
  pl->add_option("--agent", pl_agent, "agent dataset")->required();
  pl->add_option("--expert", pl_expert, "expert dataset")->required();
  pl->add_option("--env", pl_env, "grid file or chain:N")->required();
  pl->add_option("--aggregator", pl_aggregator, "max or min");
  auto* pl_seed_opt = pl->add_option("--seed", pl_seed, "seed");
  pl->add_flag("--dry-run", pl_dry_run, "print the resolved config only");
  pl->add_option("--out", pl_out, "output directory");
  AddConfigFlags(pl, pl_flags);

  // diagnose
  std::string dg_intents, dg_data, dg_out;
  int dg_k_max = 10, dg_pairs = 1000;
  std::uint64_t dg_seed = 0;
  auto* dg = app.add_subcommand("diagnose", "linearity and bound reports");
  dg->add_option("--intents", dg_intents, "intent checkpoint")->required();
  dg->add_option("--data", dg_data, "dataset")->required();
  dg->add_option("--k-max", dg_k_max, "largest step offset");
  dg->add_option("--pairs", dg_pairs, "sampled state pairs");
  dg->add_option("--seed", dg_seed, "seed");
  dg->add_option("--out", dg_out, "output directory")->required();

  // sweep
  std::string sw_agent, sw_expert, sw_env, sw_out;
  std::vector<std::string> sw_axes;
  std::uint64_t sw_seed = 0;
  ConfigFlags sw_flags;
  auto* sw = app.add_subcommand("sweep", "grid of pipeline runs");
  sw->add_option("--agent", sw_agent, "agent dataset")->required();
  sw->add_option("--expert", sw_expert, "expert dataset")->required();
  sw->add_option("--env", sw_env, "grid file or chain:N")->required();
  sw->add_option("--axis", sw_axes, "e.g. K=1;5 or alpha,tau=5,0.5;1,1");
  auto* sw_seed_opt = sw->add_option("--seed", sw_seed, "base seed");
  sw->add_option("--out", sw_out, "output directory")->required();
  AddConfigFlags(sw, sw_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const auto start = std::chrono::steady_clock::now();

  if (*gen) {
    if (gen_n < 1) throw ailot::UsageError("--n must be >= 1");
    const ailot::Environment env = LoadEnvironment(gen_env);
    ailot::Dataset data;
    if (gen_policy == "expert") {
      const ailot::Policy policy = std::visit(
          [](const auto& e) { return ailot::ExpertPolicy(e); }, env);
      data = ailot::StripLabels(ailot::Rollout(env, policy, gen_seed, gen_n),
                                true, true);
      data.metadata.expert = true;
    } else {
      data = ailot::RolloutRandom(env, gen_seed, gen_n);
    }
    ailot::SaveDataset(data, gen_out);
    return 0;
  }

  if (*ti) {
    ailot::PipelineConfig config = ti_flags.Resolve();
    config.Validate();
    ailot::IntentTrainConfig intent = config.intent;
    intent.seed = ti_seed;
    const ailot::Dataset data = ailot::LoadDataset(ti_data);
    ailot::SaveIntentModel(ailot::TrainIntents(data, intent), ti_out);
    return 0;
  }

  if (*rl) {
    ailot::PipelineConfig config = rl_flags.Resolve();
    config.Validate();
    const ailot::Dataset agent = ailot::LoadDataset(rl_agent);
    const ailot::Dataset expert = ailot::LoadDataset(rl_expert);
    const ailot::IntentModel model = ailot::LoadIntentModel(rl_intents);
    const ailot::RelabeledDataset relabeled =
        ailot::RelabelDataset(agent, expert, model, config.relabel);
    ailot::SaveDataset(relabeled.dataset, rl_out);
    if (!rl_provenance.empty()) ailot::SaveProvenance(relabeled, rl_provenance);
    if (!rl_debug.empty()) {
      WriteOtDebug(agent, expert, model, config.relabel, rl_debug);
    }
    return 0;
  }

  if (*tp) {
    ailot::PipelineConfig config = tp_flags.Resolve();
    config.Validate();
    ailot::IqlConfig iql = config.iql;
    iql.seed = tp_seed;
    const ailot::Environment env = LoadEnvironment(tp_env);
    const ailot::Dataset data = ailot::LoadDataset(tp_data);
    ailot::SavePolicy(ailot::IqlTrain(data, ailot::NumActions(env), iql),
                      tp_out);
    return 0;
  }

  if (*ev) {
    if (ev_episodes < 1) throw ailot::UsageError("--episodes must be >= 1");
    const ailot::Environment env = LoadEnvironment(ev_env);
    const ailot::IqlResult policy = ailot::LoadPolicy(ev_policy);
    const std::string csv = ailot::EvalCsv(
        ailot::Evaluate(policy.policy, env, ev_episodes, ev_seed));
    if (ev_out.empty()) {
      std::cout << csv;
    } else {
      ailot::WriteFileAtomic(ev_out, csv);
    }
    return 0;
  }

  if (*pl) {
    ailot::PipelineConfig config = pl_flags.Resolve();
    if (!pl_aggregator.empty()) config.Set("aggregator", pl_aggregator);
    if (*pl_seed_opt) config.seed = pl_seed;
    config.Validate();
    if (pl_dry_run) {
      std::cout << config.ToText();
      return 0;
    }
    if (pl_out.empty()) throw ailot::UsageError("--out is required");
    const ailot::Environment env = LoadEnvironment(pl_env);
    const ailot::Dataset agent = ailot::LoadDataset(pl_agent);
    const ailot::Dataset expert = ailot::LoadDataset(pl_expert);
    const ailot::PipelineResult result =
        ailot::RunPipeline(agent, expert, env, config);
    ailot::RunManifest manifest;
    manifest.command = "pipeline";
    manifest.config = config.Entries();
    manifest.inputs = {{"agent", pl_agent},
                       {"expert", pl_expert},
                       {"env", pl_env}};
    manifest.outputs = ailot::WritePipelineOutputs(result, pl_out);
    manifest.seed = config.seed;
    manifest.duration_seconds = Seconds(start);
    ailot::WriteManifest(manifest, pl_out);
    std::cout << ailot::EvalCsv(result.evaluation);
    return 0;
  }

  if (*dg) {
    if (dg_k_max < 1) throw ailot::UsageError("--k-max must be >= 1");
    if (dg_pairs < 1) throw ailot::UsageError("--pairs must be >= 1");
    const ailot::IntentModel model = ailot::LoadIntentModel(dg_intents);
    const ailot::Dataset data = ailot::LoadDataset(dg_data);
    const ailot::LinearityReport linearity =
        ailot::TemporalLinearityReport(model, data, dg_k_max);
    for (const std::string& w : linearity.warnings) {
      std::cerr << "warning: " << w << '\n';
    }
    ailot::Rng rng(dg_seed);
    const ailot::PropositionReport bound =
        ailot::PropositionCheck(model, data, dg_pairs, rng);
    fs::create_directories(dg_out);
    ailot::WriteFileAtomic(fs::path(dg_out) / "linearity.csv",
                           linearity.ToCsv());
    ailot::WriteFileAtomic(fs::path(dg_out) / "proposition.csv",
                           bound.ToCsv());
    return 0;
  }

  if (*sw) {
    ailot::PipelineConfig config = sw_flags.Resolve();
    if (*sw_seed_opt) config.seed = sw_seed;
    config.Validate();
    std::vector<ailot::SweepAxis> axes;
    for (const std::string& text : sw_axes) {
      axes.push_back(ailot::ParseSweepAxis(text));
    }
    const ailot::Environment env = LoadEnvironment(sw_env);
    const ailot::Dataset agent = ailot::LoadDataset(sw_agent);
    const ailot::Dataset expert = ailot::LoadDataset(sw_expert);
    const auto cells = ailot::RunSweep(
        agent, expert, env, config, axes, sw_out,
        {{"agent", sw_agent}, {"expert", sw_expert}, {"env", sw_env}});
    std::cout << ailot::SweepSummaryCsv(axes, cells);
    return 0;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const ailot::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
