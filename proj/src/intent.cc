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

#include "ailot/intent.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ailot/checksum.h"
#include "ailot/error.h"
#include "ailot/expectile.h"
#include "json.hpp"

namespace ailot {
namespace {

void CheckState(const IntentModel& model, int state) {
  if (state < 0 || state >= model.n_states) {
    throw InputError("state id " + std::to_string(state) + " out of range");
  }
}

// Clipped geometric offset from position t of a trajectory of `length`.
int FutureOffset(int t, int length, double p, Rng& rng) {
  return std::min(rng.Geometric(p), length - 1 - t);
}

struct Position {
  int trajectory;
  int t;
};

}  // namespace

IntentModel IntentModel::Zeros(int n_states, int dim) {
  if (n_states < 1 || dim < 1) {
    throw InputError("n_states and dim must be positive");
  }
  IntentModel m;
  m.n_states = n_states;
  m.dim = dim;
  m.phi = Eigen::MatrixXd::Zero(n_states, dim);
  m.psi = Eigen::MatrixXd::Zero(n_states, dim);
  m.t_base = Eigen::MatrixXd::Zero(dim, dim);
  m.t_factors.assign(dim, Eigen::MatrixXd::Zero(dim, dim));
  return m;
}

IntentModel IntentModel::RandomUniform(int n_states, int dim,
                                       double half_width, Rng& rng) {
  IntentModel m = Zeros(n_states, dim);
  m.ForEachParameter(
      [&](double& x) { x = half_width * (2.0 * rng.Uniform() - 1.0); });
  return m;
}

Eigen::MatrixXd IntentModel::Transition(
    const Eigen::Ref<const Eigen::VectorXd>& z) const {
  if (z.size() != dim) throw InputError("intent has wrong dimension");
  Eigen::MatrixXd t = t_base;
  for (int k = 0; k < dim; ++k) t.noalias() += z(k) * t_factors[k];
  return t;
}

std::size_t IntentModel::NumParameters() const {
  return static_cast<std::size_t>(2 * n_states * dim + (dim + 1) * dim * dim);
}

bool IntentModel::AllFinite() const {
  bool finite = phi.allFinite() && psi.allFinite() && t_base.allFinite();
  for (const auto& m : t_factors) finite = finite && m.allFinite();
  return finite;
}

void IntentModel::AddScaled(const IntentModel& other, double scale) {
  if (other.n_states != n_states || other.dim != dim) {
    throw InputError("intent model shapes differ");
  }
  phi += scale * other.phi;
  psi += scale * other.psi;
  t_base += scale * other.t_base;
  for (int k = 0; k < dim; ++k) t_factors[k] += scale * other.t_factors[k];
}

bool IntentModel::operator==(const IntentModel& other) const {
  return n_states == other.n_states && dim == other.dim && phi == other.phi &&
         psi == other.psi && t_base == other.t_base &&
         t_factors == other.t_factors;
}

void IntentTrainConfig::Validate() const {
  if (dim < 1) throw InputError("dim must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("gamma must be in (0,1]");
  if (!(expectile > 0.0 && expectile < 1.0)) {
    throw InputError("expectile must be in (0,1)");
  }
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be > 0");
  if (target_update_period < 1) {
    throw InputError("target_update_period must be >= 1");
  }
  if (steps < 0) throw InputError("steps must be >= 0");
  if (batch_size < 1) throw InputError("batch_size must be >= 1");
  if (!(future_geometric_p > 0.0 && future_geometric_p <= 1.0)) {
    throw InputError("future_geometric_p must be in (0,1]");
  }
}

namespace {

std::vector<Position> TransitionPositions(const Dataset& dataset) {
  std::vector<Position> positions;
  for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
    const int length = dataset.trajectories[i].size();
    if (length < 2) {
      throw SamplingError("trajectory " + std::to_string(i) +
                          " has fewer than two states");
    }
    for (int t = 0; t + 1 < length; ++t) {
      positions.push_back({static_cast<int>(i), t});
    }
  }
  if (positions.empty()) throw SamplingError("dataset has no transitions");
  return positions;
}

std::vector<IntentBatchItem> SampleAt(const Dataset& dataset,
                                      const std::vector<Position>& positions,
                                      const IntentTrainConfig& config,
                                      Rng& rng) {
  std::vector<IntentBatchItem> batch(config.batch_size);
  for (IntentBatchItem& item : batch) {
    const Position p = positions[rng.UniformInt(positions.size())];
    const auto& states = dataset.trajectories[p.trajectory].states;
    const int length = static_cast<int>(states.size());
    item.s = states[p.t];
    item.s_next = states[p.t + 1];
    item.s_plus =
        states[p.t + FutureOffset(p.t, length, config.future_geometric_p, rng)];
    item.s_z =
        states[p.t + FutureOffset(p.t, length, config.future_geometric_p, rng)];
  }
  return batch;
}

}  // namespace

std::vector<IntentBatchItem> SampleBatch(const Dataset& dataset,
                                         const IntentTrainConfig& config,
                                         Rng& rng) {
  return SampleAt(dataset, TransitionPositions(dataset), config, rng);
}

double Value(const IntentModel& model, int s, int s_plus,
             const Eigen::Ref<const Eigen::VectorXd>& z) {
  CheckState(model, s);
  CheckState(model, s_plus);
  return model.phi.row(s).dot(model.Transition(z) *
                              model.psi.row(s_plus).transpose());
}

Eigen::VectorXd Embed(const IntentModel& model, int state) {
  CheckState(model, state);
  return model.psi.row(state).transpose();
}

Eigen::MatrixXd EmbedAll(const IntentModel& model,
                         const std::vector<int>& states) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(states.size()), model.dim);
  for (std::size_t t = 0; t < states.size(); ++t) {
    CheckState(model, states[t]);
    out.row(static_cast<Eigen::Index>(t)) = model.psi.row(states[t]);
  }
  return out;
}

IcvfLossResult IcvfLossAndGrads(const IntentModel& model,
                                const IntentModel& target,
                                const std::vector<IntentBatchItem>& batch,
                                double gamma, double expectile) {
  if (model.n_states != target.n_states || model.dim != target.dim) {
    throw InputError("model and target differ in shape");
  }
  if (batch.empty()) throw InputError("empty batch");
  IcvfLossResult result{0.0, IntentModel::Zeros(model.n_states, model.dim)};
  IntentModel& grad = result.gradients;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const Eigen::Index d = model.dim;
  const Eigen::Index wide = d * (d + 1);
  const auto n = static_cast<Eigen::Index>(batch.size());

  // [T_base T_1 ... T_d], so T(z) psi = W (zhat kron psi) with zhat = (1, z).
  auto stack = [&](const IntentModel& m) {
    Eigen::MatrixXd w(d, wide);
    w.leftCols(d) = m.t_base;
    for (Eigen::Index k = 0; k < d; ++k) {
      w.middleCols((k + 1) * d, d) = m.t_factors[static_cast<std::size_t>(k)];
    }
    return w;
  };
  const Eigen::MatrixXd w_online = stack(model);
  const Eigen::MatrixXd w_target = stack(target);

  Eigen::MatrixXd zhat(d + 1, n);
  Eigen::MatrixXd kron_online(wide, n);
  Eigen::MatrixXd kron_target(wide, n);
  Eigen::MatrixXd phi_s(d, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const IntentBatchItem& item = batch[static_cast<std::size_t>(i)];
    CheckState(model, item.s);
    CheckState(model, item.s_next);
    CheckState(model, item.s_plus);
    CheckState(model, item.s_z);
    zhat(0, i) = 1.0;
    zhat.col(i).tail(d) = target.psi.row(item.s_z).transpose();
    for (Eigen::Index k = 0; k <= d; ++k) {
      kron_online.col(i).segment(k * d, d) =
          zhat(k, i) * model.psi.row(item.s_plus).transpose();
      kron_target.col(i).segment(k * d, d) =
          zhat(k, i) * target.psi.row(item.s_plus).transpose();
    }
    phi_s.col(i) = model.phi.row(item.s).transpose();
  }
  const Eigen::MatrixXd t_psi = w_online * kron_online;
  const Eigen::MatrixXd t_psi_target = w_target * kron_target;

  Eigen::VectorXd dv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const IntentBatchItem& item = batch[static_cast<std::size_t>(i)];
    const double v = phi_s.col(i).dot(t_psi.col(i));
    const double v_target_next =
        target.phi.row(item.s_next).dot(t_psi_target.col(i));
    const double v_target = target.phi.row(item.s).dot(t_psi_target.col(i));

    const bool at_goal = item.s == item.s_plus;
    const double goal_reward = at_goal ? 0.0 : -1.0;
    const double bootstrap = at_goal ? 0.0 : gamma * v_target_next;
    const double u = goal_reward + bootstrap - v;

    const double intent_reward = item.s == item.s_z ? 0.0 : -1.0;
    const double advantage = intent_reward + gamma * v_target_next - v_target;
    const double w = ExpectileWeight(expectile, advantage);

    result.loss += w * u * u * inv_batch;
    // dLoss/dV for this item.
    dv(i) = -2.0 * w * u * inv_batch;
  }

  const Eigen::MatrixXd dv_phi = phi_s * dv.asDiagonal();
  // Block k of column i is T_k^T (dv_i phi_i).
  const Eigen::MatrixXd t_phi = w_online.transpose() * dv_phi;
  for (Eigen::Index i = 0; i < n; ++i) {
    const IntentBatchItem& item = batch[static_cast<std::size_t>(i)];
    grad.phi.row(item.s) += dv(i) * t_psi.col(i).transpose();
    Eigen::VectorXd back = Eigen::VectorXd::Zero(d);
    for (Eigen::Index k = 0; k <= d; ++k) {
      back += zhat(k, i) * t_phi.col(i).segment(k * d, d);
    }
    grad.psi.row(item.s_plus) += back.transpose();
  }
  const Eigen::MatrixXd grad_w = dv_phi * kron_online.transpose();
  grad.t_base = grad_w.leftCols(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    grad.t_factors[static_cast<std::size_t>(k)] = grad_w.middleCols((k + 1) * d, d);
  }
  return result;
}

IntentModel TrainIntents(const Dataset& dataset,
                         const IntentTrainConfig& config) {
  config.Validate();
  Rng rng(config.seed);
  IntentModel model = IntentModel::RandomUniform(dataset.metadata.n_states,
                                                 config.dim, 0.1, rng);
  IntentModel target = model;
  if (config.steps == 0) return model;
  const std::vector<Position> positions = TransitionPositions(dataset);
  for (int step = 0; step < config.steps; ++step) {
    if (step % config.target_update_period == 0) target = model;
    const auto batch = SampleAt(dataset, positions, config, rng);
    IcvfLossResult r =
        IcvfLossAndGrads(model, target, batch, config.gamma, config.expectile);
    if (!std::isfinite(r.loss)) throw DivergenceError(step);
    model.AddScaled(r.gradients, -config.learning_rate);
  }
  if (!model.AllFinite()) throw DivergenceError(config.steps);
  return model;
}

double LinearityReport::PearsonIntentVsK() const {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const LinearityRow& row : rows) {
    if (row.k < 1) continue;
    xs.push_back(row.k);
    ys.push_back(row.intent_sq_dist);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (xs.size() < 2) return nan;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return nan;
  return sxy / std::sqrt(sxx * syy);
}

std::string LinearityReport::ToCsv() const {
  std::ostringstream out;
  out.precision(17);
  out << "k,intent_sq_dist,state_sq_dist\n";
  for (const LinearityRow& row : rows) {
    out << row.k << ',' << row.intent_sq_dist << ',' << row.state_sq_dist
        << '\n';
  }
  out << "# pearson_r," << PearsonIntentVsK() << '\n';
  return out.str();
}

LinearityReport TemporalLinearityReport(const IntentModel& model,
                                        const Dataset& dataset, int k_max) {
  if (k_max < 1) throw InputError("k_max must be >= 1");
  LinearityReport report;
  for (int k = 0; k <= k_max; ++k) {
    double intent_sum = 0.0;
    double state_sum = 0.0;
    int pairs = 0;
    for (const Trajectory& traj : dataset.trajectories) {
      for (int t = 0; t + k < traj.size(); ++t) {
        const int a = traj.states[t];
        const int b = traj.states[t + k];
        CheckState(model, a);
        CheckState(model, b);
        intent_sum += (model.psi.row(b) - model.psi.row(a)).squaredNorm();
        // One-hot encodings differ in two coordinates unless equal.
        state_sum += a == b ? 0.0 : 2.0;
        ++pairs;
      }
    }
    if (pairs == 0) {
      report.warnings.push_back("no pairs at offset k=" + std::to_string(k));
      continue;
    }
    report.rows.push_back(
        {k, intent_sum / pairs, state_sum / pairs, pairs});
  }
  return report;
}

std::string PropositionReport::ToCsv() const {
  std::ostringstream out;
  out.precision(17);
  out << "s,s_plus,delta,abs_value\n";
  for (const PropositionPair& p : pairs) {
    out << p.s << ',' << p.s_plus << ',' << p.delta << ',' << p.abs_value
        << '\n';
  }
  out << "# bound_constant," << bound_constant << '\n';
  out << "# self_pairs," << self_pairs << '\n';
  out << "# max_abs_value_self," << max_abs_value_self << '\n';
  return out.str();
}

PropositionReport PropositionCheck(const IntentModel& model,
                                   const Dataset& dataset, int n_pairs,
                                   Rng& rng) {
  if (n_pairs < 1) throw InputError("n_pairs must be >= 1");
  std::vector<Position> positions;
  for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
    for (int t = 0; t + 1 < dataset.trajectories[i].size(); ++t) {
      positions.push_back({static_cast<int>(i), t});
    }
  }
  if (positions.empty()) throw InputError("dataset has no transitions");

  PropositionReport report;
  for (int n = 0; n < n_pairs; ++n) {
    const Position p = positions[rng.UniformInt(positions.size())];
    const auto& states = dataset.trajectories[p.trajectory].states;
    const auto remaining = static_cast<std::uint64_t>(states.size() - p.t);
    const int s = states[p.t];
    const int s_plus = states[p.t + rng.UniformInt(remaining)];
    CheckState(model, s);
    CheckState(model, s_plus);

    PropositionPair pair{s, s_plus, 0.0, 0.0};
    pair.delta = (model.psi.row(s) - model.psi.row(s_plus)).norm();
    pair.abs_value =
        std::abs(Value(model, s, s_plus, model.psi.row(s_plus).transpose()));
    if (s == s_plus) {
      ++report.self_pairs;
      report.max_abs_value_self =
          std::max(report.max_abs_value_self, pair.abs_value);
    }
    if (pair.delta > 0.0) {
      report.bound_constant =
          std::max(report.bound_constant, pair.abs_value / pair.delta);
    }
    report.pairs.push_back(pair);
  }
  return report;
}

namespace {

std::vector<double> Flatten(const Eigen::MatrixXd& m) {
  // Row-major order in the checkpoint.
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

void Unflatten(const std::vector<double>& flat, std::size_t offset,
               Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = flat[offset + static_cast<std::size_t>(i * m.cols() + j)];
    }
  }
}

}  // namespace

void SaveIntentModel(const IntentModel& model,
                     const std::filesystem::path& path) {
  std::vector<double> factors;
  for (const auto& m : model.t_factors) {
    const auto flat = Flatten(m);
    factors.insert(factors.end(), flat.begin(), flat.end());
  }
  nlohmann::json j = {{"d", model.dim},
                      {"n_states", model.n_states},
                      {"phi", Flatten(model.phi)},
                      {"psi", Flatten(model.psi)},
                      {"t_base", Flatten(model.t_base)},
                      {"t_factors", factors}};
  WriteFileAtomic(path, j.dump() + "\n");
}

IntentModel LoadIntentModel(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadFile(path));
    const int dim = j.at("d").get<int>();
    const int n_states = j.at("n_states").get<int>();
    IntentModel model = IntentModel::Zeros(n_states, dim);
    const auto phi = j.at("phi").get<std::vector<double>>();
    const auto psi = j.at("psi").get<std::vector<double>>();
    const auto t_base = j.at("t_base").get<std::vector<double>>();
    const auto factors = j.at("t_factors").get<std::vector<double>>();
    const auto nd = static_cast<std::size_t>(n_states * dim);
    const auto dd = static_cast<std::size_t>(dim * dim);
    if (phi.size() != nd || psi.size() != nd || t_base.size() != dd ||
        factors.size() != dd * dim) {
      throw ValidationError("intent checkpoint arrays have wrong sizes");
    }
    Unflatten(phi, 0, model.phi);
    Unflatten(psi, 0, model.psi);
    Unflatten(t_base, 0, model.t_base);
    for (int k = 0; k < dim; ++k) Unflatten(factors, k * dd, model.t_factors[k]);
    if (!model.AllFinite()) throw ValidationError("non-finite parameter");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("intent checkpoint: ") + e.what(), 0);
  }
}

}  // namespace ailot
