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

#ifndef AILOT_PIPELINE_H_
#define AILOT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ailot/dataset.h"
#include "ailot/env.h"
#include "ailot/error.h"
#include "ailot/intent.h"
#include "ailot/iql.h"
#include "ailot/relabel.h"

namespace ailot {

// Failure inside one pipeline stage; what() is prefixed with the stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage " + stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Every tunable of the end-to-end run, addressable by flat keys:
//   seed, experts, eval_episodes,
//   alpha, tau, k, epsilon, max_iters, tolerance, aggregator, rescale,
//   threads,
//   intent_dim, intent_gamma, intent_expectile, intent_lr,
//   intent_target_period, intent_steps, intent_batch, intent_future_p,
//   iql_gamma, iql_expectile, iql_temperature, iql_lr, iql_steps,
//   iql_batch.
// `seed` feeds the intent trainer, IQL and evaluation.
struct PipelineConfig {
  IntentTrainConfig intent;
  RelabelConfig relabel;
  IqlConfig iql;
  int experts = 0;  // K expert trajectories kept; 0 keeps all
  int eval_episodes = 100;
  std::uint64_t seed = 0;

  PipelineConfig();

  // Throws UsageError on an unknown key or unparsable value.
  void Set(const std::string& key, const std::string& value);
  // Applies "key=value" lines; blank lines and '#' comments are skipped.
  void ApplyText(const std::string& text);
  std::vector<std::pair<std::string, std::string>> Entries() const;
  std::string ToText() const;
  void Validate() const;
};

struct PipelineResult {
  Dataset experts;
  IntentModel intents;
  RelabeledDataset relabeled;
  IqlResult policy;
  EvalResult evaluation;
};

// train-intents -> relabel -> train-policy -> evaluate. Throws StageError.
PipelineResult RunPipeline(const Dataset& agent, const Dataset& expert,
                           const Environment& env,
                           const PipelineConfig& config);

// Fixed artifact names under an output directory.
inline constexpr const char* kIntentsFile = "intents.json";
inline constexpr const char* kRelabeledFile = "relabeled.jsonl";
inline constexpr const char* kProvenanceFile = "provenance.jsonl";
inline constexpr const char* kPolicyFile = "policy.json";
inline constexpr const char* kEvalFile = "eval.csv";
inline constexpr const char* kManifestFile = "manifest.json";

// Writes every artifact except the manifest; returns name -> path.
std::map<std::string, std::filesystem::path> WritePipelineOutputs(
    const PipelineResult& result, const std::filesystem::path& out_dir);

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::filesystem::path> outputs;
  std::uint64_t seed = 0;
  double duration_seconds = 0.0;
};

// Checksums every output and writes manifest.json atomically.
void WriteManifest(const RunManifest& manifest,
                   const std::filesystem::path& out_dir);

// One sweep axis: parameters varied together, one value tuple per setting.
// Text form "alpha,tau=5,0.5;1,1" or "K=1;5".
struct SweepAxis {
  std::vector<std::string> params;
  std::vector<std::vector<std::string>> settings;
};

// Throws UsageError for parameters outside {K, alpha, tau, k, epsilon,
// aggregator} or malformed text.
SweepAxis ParseSweepAxis(const std::string& text);

struct SweepCell {
  int index = 0;
  std::vector<std::pair<std::string, std::string>> params;
  EvalResult evaluation;
};

// Cartesian product of the axes, run in order with seed = base.seed + index.
// Each cell writes its artifacts and manifest under out_dir/cell_NNN; the
// summary goes to out_dir/summary.csv.
std::vector<SweepCell> RunSweep(const Dataset& agent, const Dataset& expert,
                                const Environment& env,
                                const PipelineConfig& base,
                                const std::vector<SweepAxis>& axes,
                                const std::filesystem::path& out_dir,
                                const std::map<std::string, std::string>& inputs);

std::string SweepSummaryCsv(const std::vector<SweepAxis>& axes,
                            const std::vector<SweepCell>& cells);

}  // namespace ailot

#endif  // AILOT_PIPELINE_H_
