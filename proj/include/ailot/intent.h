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

#ifndef AILOT_INTENT_H_
#define AILOT_INTENT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ailot/dataset.h"
#include "ailot/rng.h"

namespace ailot {

// Tabular intent-conditioned value function
//
//   V(s, s+, z) = phi(s)^T T(z) psi(s+),   T(z) = T0 + sum_k z_k T_k,
//
// with the intent of a state given by its psi row.
struct IntentModel {
  int n_states = 0;
  int dim = 0;
  Eigen::MatrixXd phi;                     // n_states x dim
  Eigen::MatrixXd psi;                     // n_states x dim
  Eigen::MatrixXd t_base;                  // dim x dim
  std::vector<Eigen::MatrixXd> t_factors;  // dim matrices, dim x dim

  static IntentModel Zeros(int n_states, int dim);
  static IntentModel RandomUniform(int n_states, int dim, double half_width,
                                   Rng& rng);

  Eigen::MatrixXd Transition(const Eigen::Ref<const Eigen::VectorXd>& z) const;

  // Visits every parameter in a fixed order (phi, psi, t_base, t_factors).
  template <typename F>
  void ForEachParameter(F&& f) {
    for (Eigen::MatrixXd* m : {&phi, &psi, &t_base}) {
      for (Eigen::Index i = 0; i < m->size(); ++i) f(m->data()[i]);
    }
    for (auto& m : t_factors) {
      for (Eigen::Index i = 0; i < m.size(); ++i) f(m.data()[i]);
    }
  }
  std::size_t NumParameters() const;
  bool AllFinite() const;

  // this += scale * other
  void AddScaled(const IntentModel& other, double scale);

  bool operator==(const IntentModel& other) const;
};

struct IntentTrainConfig {
  int dim = 8;
  double gamma = 0.99;
  double expectile = 0.9;
  double learning_rate = 0.05;
  int target_update_period = 100;
  int steps = 20000;
  int batch_size = 256;
  double future_geometric_p = 0.1;
  std::uint64_t seed = 0;

  // Throws InputError on out-of-range fields.
  void Validate() const;
};

struct IntentBatchItem {
  int s = 0;
  int s_next = 0;
  int s_plus = 0;
  int s_z = 0;
};

// s is uniform over non-terminal positions; s+ and s_z sit at independent
// geometric(future_geometric_p) offsets >= 0 from s, clipped to the
// trajectory end. Throws SamplingError if any trajectory has a single state.
std::vector<IntentBatchItem> SampleBatch(const Dataset& dataset,
                                         const IntentTrainConfig& config,
                                         Rng& rng);

double Value(const IntentModel& model, int s, int s_plus,
             const Eigen::Ref<const Eigen::VectorXd>& z);

Eigen::VectorXd Embed(const IntentModel& model, int state);
// Rows are the embeddings of `states`.
Eigen::MatrixXd EmbedAll(const IntentModel& model,
                         const std::vector<int>& states);

struct IcvfLossResult {
  double loss = 0.0;
  IntentModel gradients;
};

// Expectile temporal-distance loss, averaged over the batch. With
// z = psi_target(s_z):
//
//   u = -1(s != s+) + gamma * 1(s != s+) * Vt(s', s+, z) - V(s, s+, z)
//   A = -1(s != s_z) + gamma * Vt(s', s+, z) - Vt(s, s+, z)
//   loss = mean |expectile - 1(A < 0)| u^2
//
// The bootstrap in u is cut when s == s+, which makes s+ absorbing so that
// V(s, s, .) -> 0. Gradients are taken with respect to `model` only.
IcvfLossResult IcvfLossAndGrads(const IntentModel& model,
                                const IntentModel& target,
                                const std::vector<IntentBatchItem>& batch,
                                double gamma, double expectile);

// Uniform [-0.1, 0.1] initialization, plain gradient descent, hard target
// copies every target_update_period steps. Throws DivergenceError on a
// non-finite loss.
IntentModel TrainIntents(const Dataset& dataset,
                         const IntentTrainConfig& config);

struct LinearityRow {
  int k = 0;
  double intent_sq_dist = 0.0;
  double state_sq_dist = 0.0;
  int pairs = 0;
};

struct LinearityReport {
  std::vector<LinearityRow> rows;
  std::vector<std::string> warnings;

  // Pearson correlation of k against intent_sq_dist over rows with k >= 1;
  // NaN with fewer than two such rows or zero variance.
  double PearsonIntentVsK() const;
  std::string ToCsv() const;
};

// Mean squared intent and one-hot state distances between s_t and s_{t+k},
// for k = 0..k_max. Offsets without any pair are omitted with a warning.
LinearityReport TemporalLinearityReport(const IntentModel& model,
                                        const Dataset& dataset, int k_max);

struct PropositionPair {
  int s = 0;
  int s_plus = 0;
  double delta = 0.0;
  double abs_value = 0.0;
};

struct PropositionReport {
  std::vector<PropositionPair> pairs;
  // Smallest c with |V(s, s+, psi(s+))| <= c * delta over pairs with
  // delta > 0.
  double bound_constant = 0.0;
  // Largest |V| over pairs with s == s+.
  double max_abs_value_self = 0.0;
  int self_pairs = 0;

  std::string ToCsv() const;
};

// Samples s uniformly over non-terminal positions, as in SampleBatch, and
// s+ uniformly among the same and later states of that trajectory.
PropositionReport PropositionCheck(const IntentModel& model,
                                   const Dataset& dataset, int n_pairs,
                                   Rng& rng);

void SaveIntentModel(const IntentModel& model,
                     const std::filesystem::path& path);
IntentModel LoadIntentModel(const std::filesystem::path& path);

}  // namespace ailot

#endif  // AILOT_INTENT_H_
