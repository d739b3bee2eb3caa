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

#include "ailot/pipeline.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <system_error>

#include "ailot/checksum.h"
#include "json.hpp"

namespace ailot {
namespace {

std::string FormatDouble(double value) {
  char buffer[64];
  const auto r = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, r.ptr);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, value);
  if (r.ec != std::errc() || r.ptr != end) {
    throw UsageError("invalid value '" + text + "' for " + key);
  }
  return value;
}

struct ConfigKey {
  const char* name;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <typename T, typename Member>
ConfigKey NumberKey(const char* name, Member member) {
  return {name,
          [name, member](PipelineConfig& c, const std::string& v) {
            std::invoke(member, c) = ParseNumber<T>(name, v);
          },
          [member](const PipelineConfig& c) {
            PipelineConfig copy = c;
            if constexpr (std::is_floating_point_v<T>) {
              return FormatDouble(std::invoke(member, copy));
            } else {
              return std::to_string(std::invoke(member, copy));
            }
          }};
}

const std::vector<ConfigKey>& ConfigKeys() {
  using C = PipelineConfig;
  static const std::vector<ConfigKey> keys = {
      NumberKey<std::uint64_t>("seed", [](C& c) -> auto& { return c.seed; }),
      NumberKey<int>("experts", [](C& c) -> auto& { return c.experts; }),
      NumberKey<int>("eval_episodes",
                     [](C& c) -> auto& { return c.eval_episodes; }),
      NumberKey<double>("alpha", [](C& c) -> auto& { return c.relabel.alpha; }),
      NumberKey<double>("tau", [](C& c) -> auto& { return c.relabel.tau; }),
      NumberKey<int>("k", [](C& c) -> auto& { return c.relabel.k; }),
      NumberKey<double>("epsilon",
                        [](C& c) -> auto& { return c.relabel.epsilon; }),
      NumberKey<int>("max_iters",
                     [](C& c) -> auto& { return c.relabel.max_iters; }),
      NumberKey<double>("tolerance",
                        [](C& c) -> auto& { return c.relabel.tolerance; }),
      {"aggregator",
       [](C& c, const std::string& v) {
         try {
           c.relabel.aggregator = ParseAggregator(v);
         } catch (const InputError& e) {
           throw UsageError(e.what());
         }
       },
       [](const C& c) { return ToString(c.relabel.aggregator); }},
      {"rescale",
       [](C& c, const std::string& v) {
         try {
           c.relabel.rescale = ParseRescaleMode(v);
         } catch (const InputError& e) {
           throw UsageError(e.what());
         }
       },
       [](const C& c) { return ToString(c.relabel.rescale); }},
      NumberKey<int>("threads", [](C& c) -> auto& { return c.relabel.threads; }),
      NumberKey<int>("intent_dim", [](C& c) -> auto& { return c.intent.dim; }),
      NumberKey<double>("intent_gamma",
                        [](C& c) -> auto& { return c.intent.gamma; }),
      NumberKey<double>("intent_expectile",
                        [](C& c) -> auto& { return c.intent.expectile; }),
      NumberKey<double>("intent_lr",
                        [](C& c) -> auto& { return c.intent.learning_rate; }),
      NumberKey<int>("intent_target_period", [](C& c) -> auto& {
        return c.intent.target_update_period;
      }),
      NumberKey<int>("intent_steps", [](C& c) -> auto& { return c.intent.steps; }),
      NumberKey<int>("intent_batch",
                     [](C& c) -> auto& { return c.intent.batch_size; }),
      NumberKey<double>("intent_future_p", [](C& c) -> auto& {
        return c.intent.future_geometric_p;
      }),
      NumberKey<double>("iql_gamma", [](C& c) -> auto& { return c.iql.gamma; }),
      NumberKey<double>("iql_expectile",
                        [](C& c) -> auto& { return c.iql.expectile; }),
      NumberKey<double>("iql_temperature",
                        [](C& c) -> auto& { return c.iql.temperature; }),
      NumberKey<double>("iql_lr",
                        [](C& c) -> auto& { return c.iql.learning_rate; }),
      NumberKey<int>("iql_steps", [](C& c) -> auto& { return c.iql.steps; }),
      NumberKey<int>("iql_batch", [](C& c) -> auto& { return c.iql.batch_size; }),
      {"iql_absorbing_goal",
       [](C& c, const std::string& v) {
         if (v == "true" || v == "1") {
           c.iql.absorbing_goal = true;
         } else if (v == "false" || v == "0") {
           c.iql.absorbing_goal = false;
         } else {
           throw UsageError("iql_absorbing_goal: expected true or false");
         }
       },
       [](const C& c) {
         return std::string(c.iql.absorbing_goal ? "true" : "false");
       }},
  };
  return keys;
}

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) parts.push_back(Trim(part));
  if (!s.empty() && s.back() == sep) parts.push_back("");
  return parts;
}

template <typename F>
auto InStage(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

PipelineConfig::PipelineConfig() = default;

void PipelineConfig::Set(const std::string& key, const std::string& value) {
  for (const ConfigKey& k : ConfigKeys()) {
    if (key == k.name) {
      k.set(*this, Trim(value));
      return;
    }
  }
  throw UsageError("unknown config key '" + key + "'");
}

void PipelineConfig::ApplyText(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) +
                       ": expected key=value");
    }
    Set(Trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::Entries()
    const {
  std::vector<std::pair<std::string, std::string>> entries;
  for (const ConfigKey& k : ConfigKeys()) {
    entries.emplace_back(k.name, k.get(*this));
  }
  return entries;
}

std::string PipelineConfig::ToText() const {
  std::string out;
  for (const auto& [key, value] : Entries()) out += key + "=" + value + "\n";
  return out;
}

void PipelineConfig::Validate() const {
  try {
    relabel.Validate();
    intent.Validate();
    iql.Validate();
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  if (experts < 0) throw UsageError("experts must be >= 0");
  if (eval_episodes < 1) throw UsageError("eval_episodes must be >= 1");
}

PipelineResult RunPipeline(const Dataset& agent, const Dataset& expert,
                           const Environment& env,
                           const PipelineConfig& config) {
  config.Validate();
  PipelineResult result;
  result.experts = InStage("select-experts", [&] {
    if (agent.metadata.n_states != NumStates(env) ||
        expert.metadata.n_states != NumStates(env)) {
      throw InputError("datasets do not match the environment state space");
    }
    if (config.experts == 0) return expert;
    const auto criterion = expert.metadata.goal
                               ? SelectionCriterion::kReachedGoal
                               : SelectionCriterion::kTopReturn;
    return SelectExpertTrajectories(expert, config.experts, criterion);
  });

  IntentTrainConfig intent = config.intent;
  intent.seed = config.seed;
  result.intents =
      InStage("train-intents", [&] { return TrainIntents(agent, intent); });

  result.relabeled = InStage("relabel", [&] {
    return RelabelDataset(agent, result.experts, result.intents,
                          config.relabel);
  });

  IqlConfig iql = config.iql;
  iql.seed = config.seed;
  result.policy = InStage("train-policy", [&] {
    return IqlTrain(result.relabeled.dataset, NumActions(env), iql);
  });

  result.evaluation = InStage("evaluate", [&] {
    return Evaluate(result.policy.policy, env, config.eval_episodes,
                    config.seed);
  });
  return result;
}

std::map<std::string, std::filesystem::path> WritePipelineOutputs(
    const PipelineResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::map<std::string, std::filesystem::path> outputs = {
      {"intents", out_dir / kIntentsFile},
      {"relabeled", out_dir / kRelabeledFile},
      {"provenance", out_dir / kProvenanceFile},
      {"policy", out_dir / kPolicyFile},
      {"eval", out_dir / kEvalFile},
  };
  SaveIntentModel(result.intents, outputs["intents"]);
  SaveDataset(result.relabeled.dataset, outputs["relabeled"]);
  SaveProvenance(result.relabeled, outputs["provenance"]);
  SavePolicy(result.policy, outputs["policy"]);
  WriteFileAtomic(outputs["eval"], EvalCsv(result.evaluation));
  return outputs;
}

void WriteManifest(const RunManifest& manifest,
                   const std::filesystem::path& out_dir) {
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [key, value] : manifest.config) config[key] = value;
  nlohmann::json outputs = nlohmann::json::object();
  for (const auto& [name, path] : manifest.outputs) {
    outputs[name] = {{"path", path.filename().string()},
                     {"sha256", Sha256File(path)}};
  }
  nlohmann::json j = {{"command", manifest.command},
                      {"config", config},
                      {"inputs", manifest.inputs},
                      {"outputs", outputs},
                      {"seed", manifest.seed},
                      {"duration_seconds", manifest.duration_seconds}};
  std::filesystem::create_directories(out_dir);
  WriteFileAtomic(out_dir / kManifestFile, j.dump(2) + "\n");
}

SweepAxis ParseSweepAxis(const std::string& text) {
  static const std::vector<std::string> kAllowed = {"K",       "alpha",
                                                    "tau",     "k",
                                                    "epsilon", "aggregator"};
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw UsageError("sweep axis must look like name[,name]=v[,v];...");
  }
  SweepAxis axis;
  axis.params = Split(text.substr(0, eq), ',');
  for (const std::string& p : axis.params) {
    if (std::find(kAllowed.begin(), kAllowed.end(), p) == kAllowed.end()) {
      throw UsageError("unknown sweep parameter '" + p + "'");
    }
  }
  for (const std::string& setting : Split(text.substr(eq + 1), ';')) {
    if (setting.empty()) continue;
    auto values = Split(setting, ',');
    if (values.size() != axis.params.size()) {
      throw UsageError("sweep setting '" + setting + "' has " +
                       std::to_string(values.size()) + " values for " +
                       std::to_string(axis.params.size()) + " parameters");
    }
    axis.settings.push_back(std::move(values));
  }
  if (axis.settings.empty()) throw UsageError("sweep axis has no values");
  return axis;
}

std::vector<SweepCell> RunSweep(const Dataset& agent, const Dataset& expert,
                                const Environment& env,
                                const PipelineConfig& base,
                                const std::vector<SweepAxis>& axes,
                                const std::filesystem::path& out_dir,
                                const std::map<std::string, std::string>& inputs) {
  std::size_t n_cells = 1;
  for (const SweepAxis& axis : axes) n_cells *= axis.settings.size();

  std::vector<SweepCell> cells;
  for (std::size_t index = 0; index < n_cells; ++index) {
    const auto start = std::chrono::steady_clock::now();
    SweepCell cell;
    cell.index = static_cast<int>(index);
    PipelineConfig config = base;
    // Row-major over the axes: the last axis varies fastest.
    std::size_t rest = index;
    std::vector<std::size_t> choice(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      choice[a] = rest % axes[a].settings.size();
      rest /= axes[a].settings.size();
    }
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& setting = axes[a].settings[choice[a]];
      for (std::size_t p = 0; p < axes[a].params.size(); ++p) {
        const std::string& name = axes[a].params[p];
        config.Set(name == "K" ? "experts" : name, setting[p]);
        cell.params.emplace_back(name, setting[p]);
      }
    }
    config.seed = base.seed + index;

    const PipelineResult result = RunPipeline(agent, expert, env, config);
    cell.evaluation = result.evaluation;
    char name[32];
    std::snprintf(name, sizeof(name), "cell_%03zu", index);
    const auto cell_dir = out_dir / name;
    RunManifest manifest;
    manifest.command = "sweep-cell";
    manifest.config = config.Entries();
    manifest.inputs = inputs;
    manifest.outputs = WritePipelineOutputs(result, cell_dir);
    manifest.seed = config.seed;
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    WriteManifest(manifest, cell_dir);
    cells.push_back(std::move(cell));
  }
  std::filesystem::create_directories(out_dir);
  WriteFileAtomic(out_dir / "summary.csv", SweepSummaryCsv(axes, cells));
  return cells;
}

std::string SweepSummaryCsv(const std::vector<SweepAxis>& axes,
                            const std::vector<SweepCell>& cells) {
  std::ostringstream out;
  out.precision(17);
  out << "cell";
  for (const SweepAxis& axis : axes) {
    for (const std::string& p : axis.params) out << ',' << p;
  }
  out << ",success_rate,mean_length\n";
  for (const SweepCell& cell : cells) {
    out << cell.index;
    for (const auto& [name, value] : cell.params) out << ',' << value;
    out << ',' << cell.evaluation.success_rate << ','
        << cell.evaluation.mean_length << '\n';
  }
  return out.str();
}

}  // namespace ailot
