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
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ailot/dataset.h"
#include "ailot/env.h"
#include "ailot/error.h"
#include "ailot/expectile.h"
#include "ailot/intent.h"
#include "ailot/rng.h"
#include "oracles.h"

namespace ailot {
namespace {

Dataset LineDataset(int length) {
  Dataset d;
  d.metadata = {"line", length, 0, false};
  Trajectory t;
  for (int s = 0; s < length; ++s) t.states.push_back(s);
  d.trajectories.push_back(t);
  return d;
}

std::vector<IntentBatchItem> RandomBatch(int n_states, int size, Rng& rng) {
  std::vector<IntentBatchItem> batch(size);
  for (auto& item : batch) {
    item.s = static_cast<int>(rng.UniformInt(n_states));
    item.s_next = static_cast<int>(rng.UniformInt(n_states));
    // Mix in coincidences.
    item.s_plus = rng.Uniform() < 0.3 ? item.s
                                      : static_cast<int>(rng.UniformInt(n_states));
    item.s_z = rng.Uniform() < 0.3 ? item.s
                                   : static_cast<int>(rng.UniformInt(n_states));
  }
  return batch;
}

// Per-item loss, built from T(z) directly.
double ReferenceLoss(const IntentModel& m, const IntentModel& target,
                     const std::vector<IntentBatchItem>& batch, double gamma,
                     double expectile) {
  double total = 0.0;
  for (const auto& it : batch) {
    const Eigen::VectorXd z = target.psi.row(it.s_z).transpose();
    auto v = [&](const IntentModel& model, int a, int b) {
      Eigen::MatrixXd t = model.t_base;
      for (int k = 0; k < model.dim; ++k) t += z(k) * model.t_factors[k];
      return model.phi.row(a).dot(t * model.psi.row(b).transpose());
    };
    const double not_goal = it.s != it.s_plus ? 1.0 : 0.0;
    const double u = -not_goal + gamma * not_goal * v(target, it.s_next, it.s_plus) -
                     v(m, it.s, it.s_plus);
    const double adv = -(it.s != it.s_z ? 1.0 : 0.0) +
                       gamma * v(target, it.s_next, it.s_plus) -
                       v(target, it.s, it.s_plus);
    const double w = std::abs(expectile - (adv < 0.0 ? 1.0 : 0.0));
    total += w * u * u;
  }
  return total / static_cast<double>(batch.size());
}

TEST(IntentValue, ZeroModelIsZero) {
  const IntentModel m = IntentModel::Zeros(5, 3);
  EXPECT_EQ(Value(m, 1, 3, Eigen::VectorXd::Ones(3)), 0.0);
}

TEST(IntentValue, ScalarProduct) {
  IntentModel m = IntentModel::Zeros(2, 1);
  m.phi(0, 0) = 2.0;
  m.t_base(0, 0) = 3.0;
  m.psi(1, 0) = 5.0;
  EXPECT_EQ(Value(m, 0, 1, Eigen::VectorXd::Zero(1)), 30.0);
}

TEST(IntentValue, AssociativityOracle) {
  Rng rng(3);
  const IntentModel m = IntentModel::RandomUniform(6, 4, 1.0, rng);
  Eigen::VectorXd z(4);
  for (int k = 0; k < 4; ++k) z(k) = 2.0 * rng.Uniform() - 1.0;
  const Eigen::MatrixXd t = m.Transition(z);
  for (int s = 0; s < 6; ++s) {
    for (int sp = 0; sp < 6; ++sp) {
      const double right = m.phi.row(s).dot(t * m.psi.row(sp).transpose());
      const double left = (m.phi.row(s) * t).dot(m.psi.row(sp));
      EXPECT_NEAR(Value(m, s, sp, z), right, 1e-12);
      EXPECT_NEAR(right, left, 1e-12);
    }
  }
}

TEST(IntentValue, InputErrors) {
  const IntentModel m = IntentModel::Zeros(3, 2);
  EXPECT_THROW(Value(m, 0, 1, Eigen::VectorXd::Zero(3)), InputError);
  EXPECT_THROW(Value(m, 3, 1, Eigen::VectorXd::Zero(2)), InputError);
  EXPECT_THROW(Embed(m, -1), InputError);
}

TEST(IntentValue, AffineInIntent) {
  Rng rng(5);
  const IntentModel m = IntentModel::RandomUniform(4, 3, 1.0, rng);
  Eigen::VectorXd z1(3), z2(3);
  z1 << 0.3, -1.2, 0.7;
  z2 << -0.5, 0.1, 2.0;
  const double a = 1.7, b = -0.4;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  for (int s = 0; s < 4; ++s) {
    const double base = Value(m, s, 2, zero);
    const double lhs = Value(m, s, 2, a * z1 + b * z2) - base;
    const double rhs =
        a * (Value(m, s, 2, z1) - base) + b * (Value(m, s, 2, z2) - base);
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(IntentEmbed, IsPsiRow) {
  Rng rng(9);
  const IntentModel m = IntentModel::RandomUniform(4, 3, 1.0, rng);
  for (int s = 0; s < 4; ++s) {
    EXPECT_EQ(Embed(m, s), Eigen::VectorXd(m.psi.row(s).transpose()));
    EXPECT_EQ(Embed(m, s), Embed(m, s));
  }
  const Eigen::MatrixXd rows = EmbedAll(m, {2, 0, 2});
  EXPECT_EQ(Eigen::VectorXd(rows.row(0).transpose()), Embed(m, 2));
  EXPECT_EQ(Eigen::VectorXd(rows.row(1).transpose()), Embed(m, 0));
}

TEST(IntentSampling, StructuralConstraint) {
  // Trajectory [a, b, c] = [7, 8, 9].
  Dataset d;
  d.metadata = {"line", 10, 0, false};
  d.trajectories.push_back({{7, 8, 9}});
  IntentTrainConfig config;
  config.batch_size = 2000;
  Rng rng(1);
  for (const auto& item : SampleBatch(d, config, rng)) {
    EXPECT_EQ(item.s_next, item.s + 1);
    if (item.s == 8) {
      EXPECT_TRUE(item.s_plus == 8 || item.s_plus == 9);
    }
    EXPECT_GE(item.s_plus, item.s);
    EXPECT_GE(item.s_z, item.s);
  }
}

TEST(IntentSampling, DegenerateGeometric) {
  IntentTrainConfig config;
  config.future_geometric_p = 1.0;
  config.batch_size = 500;
  Rng rng(2);
  for (const auto& item : SampleBatch(LineDataset(20), config, rng)) {
    EXPECT_EQ(item.s_plus, item.s);
    EXPECT_EQ(item.s_z, item.s);
  }
}

TEST(IntentSampling, OffsetsFollowTruncatedGeometric) {
  const int length = 50;
  const double p = 0.1;
  IntentTrainConfig config;
  config.future_geometric_p = p;
  config.batch_size = 100000;
  Rng rng(17);
  std::vector<double> counts(length, 0.0);
  for (const auto& item : SampleBatch(LineDataset(length), config, rng)) {
    counts[item.s_plus - item.s] += 1.0;
  }
  // Mixture over the 49 start positions of a geometric clipped at the end.
  std::vector<double> pmf(length, 0.0);
  for (int i = 0; i + 1 < length; ++i) {
    const int room = length - 1 - i;
    for (int d = 0; d < room; ++d) pmf[d] += p * std::pow(1.0 - p, d) / 49.0;
    pmf[room] += std::pow(1.0 - p, room) / 49.0;
  }
  // Pool bins until each expected count is >= 5.
  double stat = 0.0;
  int bins = 0;
  double obs = 0.0, expected = 0.0;
  for (int d = 0; d < length; ++d) {
    obs += counts[d];
    expected += pmf[d] * config.batch_size;
    if (expected >= 5.0 || d == length - 1) {
      stat += (obs - expected) * (obs - expected) / expected;
      ++bins;
      obs = expected = 0.0;
    }
  }
  EXPECT_GT(oracle::ChiSquaredSurvival(stat, bins - 1), 0.01)
      << "chi2=" << stat << " bins=" << bins;
}

TEST(IntentSampling, SingleStateTrajectoryFails) {
  Dataset d = LineDataset(4);
  d.trajectories.push_back({{2}});
  IntentTrainConfig config;
  Rng rng(0);
  EXPECT_THROW(SampleBatch(d, config, rng), SamplingError);
}

TEST(IntentSampling, DeterministicGivenRng) {
  IntentTrainConfig config;
  config.batch_size = 64;
  Rng a(4), b(4);
  const auto x = SampleBatch(LineDataset(30), config, a);
  const auto y = SampleBatch(LineDataset(30), config, b);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].s, y[i].s);
    EXPECT_EQ(x[i].s_plus, y[i].s_plus);
    EXPECT_EQ(x[i].s_z, y[i].s_z);
  }
}

TEST(ExpectileWeight, PointwiseLaw) {
  for (double tau = 0.05; tau < 1.0; tau += 0.05) {
    for (double adv : {-3.0, -1e-12, 0.0, 1e-12, 2.0}) {
      EXPECT_DOUBLE_EQ(ExpectileWeight(tau, adv), adv < 0.0 ? 1.0 - tau : tau);
      EXPECT_DOUBLE_EQ(ExpectileWeight(tau, adv),
                       std::abs(tau - (adv < 0.0 ? 1.0 : 0.0)));
    }
    EXPECT_DOUBLE_EQ(ExpectileWeight(0.5, -1.0), ExpectileWeight(0.5, 1.0));
  }
}

TEST(IcvfLoss, ZeroAtGoalFixedPoint) {
  const IntentModel zero = IntentModel::Zeros(3, 2);
  const std::vector<IntentBatchItem> batch = {{1, 2, 1, 1}, {0, 0, 0, 0}};
  const IcvfLossResult r = IcvfLossAndGrads(zero, zero, batch, 0.37, 0.9);
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.gradients, IntentModel::Zeros(3, 2));
}

TEST(IcvfLoss, SymmetricExpectileHalvesSquaredResidual) {
  Rng rng(21);
  const IntentModel m = IntentModel::RandomUniform(5, 3, 1.0, rng);
  const IntentModel t = IntentModel::RandomUniform(5, 3, 1.0, rng);
  const auto batch = RandomBatch(5, 16, rng);
  const double loss = IcvfLossAndGrads(m, t, batch, 0.9, 0.5).loss;
  // w = 0.5 everywhere; also the mean of the 0.2 and 0.8 losses.
  EXPECT_NEAR(loss, ReferenceLoss(m, t, batch, 0.9, 0.5), 1e-12);
  const double l2 = IcvfLossAndGrads(m, t, batch, 0.9, 0.2).loss;
  const double l8 = IcvfLossAndGrads(m, t, batch, 0.9, 0.8).loss;
  EXPECT_NEAR(loss, 0.5 * (l2 + l8), 1e-12);
}

TEST(IcvfLoss, MatchesPerItemReference) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const IntentModel m = IntentModel::RandomUniform(6, 3, 1.0, rng);
    const IntentModel t = IntentModel::RandomUniform(6, 3, 1.0, rng);
    const auto batch = RandomBatch(6, 8, rng);
    EXPECT_NEAR(IcvfLossAndGrads(m, t, batch, 0.95, 0.9).loss,
                ReferenceLoss(m, t, batch, 0.95, 0.9), 1e-12);
  }
}

// Central differences of the loss with respect to every online parameter.
void ExpectGradientMatchesFiniteDifferences(const IntentModel& m,
                                            const IntentModel& t,
                                            const std::vector<IntentBatchItem>& b,
                                            double gamma, double expectile) {
  const IcvfLossResult r = IcvfLossAndGrads(m, t, b, gamma, expectile);
  IntentModel analytic = r.gradients;
  std::vector<double> grads;
  analytic.ForEachParameter([&](double& g) { grads.push_back(g); });

  const double h = 1e-5;
  IntentModel probe = m;
  std::size_t index = 0;
  probe.ForEachParameter([&](double& x) {
    const double saved = x;
    x = saved + h;
    const double up = IcvfLossAndGrads(probe, t, b, gamma, expectile).loss;
    x = saved - h;
    const double down = IcvfLossAndGrads(probe, t, b, gamma, expectile).loss;
    x = saved;
    const double fd = (up - down) / (2.0 * h);
    const double a = grads[index++];
    const double scale = std::max(std::abs(a), std::abs(fd));
    if (scale > 1e-7) {
      EXPECT_LT(std::abs(a - fd) / scale, 1e-4)
          << "parameter " << index - 1 << " analytic " << a << " fd " << fd;
    } else {
      EXPECT_LT(std::abs(a - fd), 1e-9);
    }
  });
}

TEST(IcvfGradient, FiniteDifferenceProperty) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const IntentModel m = IntentModel::RandomUniform(6, 3, 1.0, rng);
    const IntentModel t = IntentModel::RandomUniform(6, 3, 1.0, rng);
    const auto batch = RandomBatch(6, 8, rng);
    ExpectGradientMatchesFiniteDifferences(m, t, batch, 0.9, 0.8);
  }
}

TEST(IcvfGradient, TargetPathCarriesNoGradient) {
  // online == target; only the online copy is perturbed.
  Rng rng(12);
  const IntentModel m = IntentModel::RandomUniform(5, 3, 1.0, rng);
  const auto batch = RandomBatch(5, 8, rng);
  ExpectGradientMatchesFiniteDifferences(m, m, batch, 0.99, 0.9);

  const IntentModel g = IcvfLossAndGrads(m, m, batch, 0.99, 0.9).gradients;
  IntentModel both = m;
  const double h = 1e-5;
  both.psi(batch[0].s_z, 0) += h;
  IntentModel both_down = m;
  both_down.psi(batch[0].s_z, 0) -= h;
  const double fd_both =
      (IcvfLossAndGrads(both, both, batch, 0.99, 0.9).loss -
       IcvfLossAndGrads(both_down, both_down, batch, 0.99, 0.9).loss) /
      (2.0 * h);
  // Perturbing both copies gives a different slope on this draw.
  EXPECT_GT(std::abs(fd_both - g.psi(batch[0].s_z, 0)), 1e-6);
}

TEST(IntentTrainConfig, RejectsOutOfRange) {
  auto bad = [](auto mutate) {
    IntentTrainConfig c;
    mutate(c);
    return c;
  };
  EXPECT_NO_THROW(IntentTrainConfig{}.Validate());
  EXPECT_THROW(bad([](auto& c) { c.gamma = 0.0; }).Validate(), InputError);
  EXPECT_THROW(bad([](auto& c) { c.gamma = 1.01; }).Validate(), InputError);
  EXPECT_THROW(bad([](auto& c) { c.expectile = 1.0; }).Validate(), InputError);
  EXPECT_THROW(bad([](auto& c) { c.learning_rate = 0.0; }).Validate(),
               InputError);
  EXPECT_THROW(bad([](auto& c) { c.target_update_period = 0; }).Validate(),
               InputError);
  EXPECT_THROW(bad([](auto& c) { c.batch_size = 0; }).Validate(), InputError);
  EXPECT_THROW(bad([](auto& c) { c.future_geometric_p = 0.0; }).Validate(),
               InputError);
  EXPECT_THROW(bad([](auto& c) { c.dim = 0; }).Validate(), InputError);
}

TEST(TrainIntents, ZeroStepsReturnsInitialization) {
  IntentTrainConfig config;
  config.steps = 0;
  config.dim = 3;
  config.seed = 5;
  const Dataset d = LineDataset(6);
  const IntentModel m = TrainIntents(d, config);
  Rng rng(5);
  EXPECT_EQ(m, IntentModel::RandomUniform(6, 3, 0.1, rng));
  for (int s = 0; s < 6; ++s) {
    EXPECT_LE(m.psi.row(s).cwiseAbs().maxCoeff(), 0.1);
  }
}

TEST(TrainIntents, DeterministicGivenSeed) {
  IntentTrainConfig config;
  config.steps = 200;
  config.batch_size = 32;
  config.seed = 11;
  const Dataset d = RolloutRandom(ChainMDP(5, 20), 3, 10);
  EXPECT_EQ(TrainIntents(d, config), TrainIntents(d, config));
}

TEST(TrainIntents, DivergenceReportsStep) {
  IntentTrainConfig config;
  config.steps = 5000;
  config.learning_rate = 1e6;
  const Dataset d = RolloutRandom(ChainMDP(5, 20), 3, 10);
  EXPECT_THROW(TrainIntents(d, config), DivergenceError);
}

TEST(TrainIntents, TwoStateChainFixedPoint) {
  // Random walks on a 2-state chain: 0 -> 1 (goal) or stay at 0. The
  // optimal goal-conditioned value is 0 at the goal itself and -1 one step
  // away.
  const Dataset d = RolloutRandom(ChainMDP(2, 8), 1, 50);
  IntentTrainConfig config;
  config.dim = 2;
  config.steps = 4000;
  config.batch_size = 64;
  const IntentModel m = TrainIntents(d, config);
  for (int s = 0; s < 2; ++s) {
    EXPECT_NEAR(Value(m, s, s, Embed(m, s)), 0.0, 0.15) << "s=" << s;
  }
  EXPECT_LT(Value(m, 0, 1, Embed(m, 1)), Value(m, 1, 1, Embed(m, 1)));
}

TEST(TrainIntents, CorridorIntentDistanceGrowsWithSteps) {
  const Dataset d = RolloutRandom(ChainMDP(8, 64), 5, 100);
  int ordered = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    IntentTrainConfig config;
    config.seed = seed;
    config.steps = 3000;
    config.batch_size = 128;
    config.learning_rate = 0.5;
    config.future_geometric_p = 0.2;
    const IntentModel m = TrainIntents(d, config);
    const double one = (Embed(m, 0) - Embed(m, 1)).squaredNorm();
    const double two = (Embed(m, 0) - Embed(m, 2)).squaredNorm();
    ordered += two > one ? 1 : 0;
  }
  EXPECT_GE(ordered, 9);
}

TEST(LinearityReport, ZeroOffsetAndZeroModel) {
  const Dataset d = RolloutRandom(ChainMDP(6, 30), 2, 20);
  Rng rng(1);
  const IntentModel trained = IntentModel::RandomUniform(6, 3, 1.0, rng);
  const LinearityReport r = TemporalLinearityReport(trained, d, 3);
  ASSERT_FALSE(r.rows.empty());
  EXPECT_EQ(r.rows[0].k, 0);
  EXPECT_EQ(r.rows[0].intent_sq_dist, 0.0);
  EXPECT_EQ(r.rows[0].state_sq_dist, 0.0);

  const LinearityReport z = TemporalLinearityReport(IntentModel::Zeros(6, 3), d, 3);
  for (const auto& row : z.rows) EXPECT_EQ(row.intent_sq_dist, 0.0);
}

TEST(LinearityReport, MatchesDirectAverage) {
  const Dataset d = RolloutRandom(ChainMDP(6, 30), 4, 15);
  Rng rng(2);
  const IntentModel m = IntentModel::RandomUniform(6, 3, 1.0, rng);
  const LinearityReport r = TemporalLinearityReport(m, d, 4);
  for (const auto& row : r.rows) {
    double intent = 0.0, state = 0.0;
    int n = 0;
    for (const auto& t : d.trajectories) {
      for (int i = 0; i + row.k < t.size(); ++i) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(6), b = Eigen::VectorXd::Zero(6);
        a(t.states[i]) = 1.0;
        b(t.states[i + row.k]) = 1.0;
        state += (a - b).squaredNorm();
        intent += (m.psi.row(t.states[i]) - m.psi.row(t.states[i + row.k]))
                      .squaredNorm();
        ++n;
      }
    }
    EXPECT_NEAR(row.intent_sq_dist, intent / n, 1e-12);
    EXPECT_NEAR(row.state_sq_dist, state / n, 1e-12);
  }
}

TEST(LinearityReport, MissingOffsetsWarn) {
  const Dataset d = LineDataset(3);
  const LinearityReport r = TemporalLinearityReport(IntentModel::Zeros(3, 2), d, 5);
  EXPECT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.warnings.size(), 3u);
  EXPECT_EQ(r.ToCsv().substr(0, r.ToCsv().find('\n')),
            "k,intent_sq_dist,state_sq_dist");
  EXPECT_THROW(TemporalLinearityReport(IntentModel::Zeros(3, 2), d, 0),
               InputError);
}

TEST(LinearityReport, PearsonMatchesOracle) {
  LinearityReport r;
  r.rows = {{0, 0.0, 0.0, 1}, {1, 1.0, 0.0, 1}, {2, 1.5, 0.0, 1}, {3, 3.5, 0.0, 1}};
  EXPECT_NEAR(r.PearsonIntentVsK(),
              oracle::Pearson({1, 2, 3}, {1.0, 1.5, 3.5}), 1e-12);
}

TEST(PropositionCheck, ZeroModelHasZeroConstant) {
  const Dataset d = RolloutRandom(ChainMDP(5, 20), 1, 10);
  Rng rng(3);
  const PropositionReport r =
      PropositionCheck(IntentModel::Zeros(5, 3), d, 200, rng);
  EXPECT_EQ(r.bound_constant, 0.0);
  for (const auto& p : r.pairs) EXPECT_EQ(p.abs_value, 0.0);
}

TEST(PropositionCheck, BoundHoldsAndMatchesRecomputation) {
  const Dataset d = RolloutRandom(ChainMDP(7, 30), 6, 20);
  Rng model_rng(4);
  const IntentModel m = IntentModel::RandomUniform(7, 3, 1.0, model_rng);
  Rng rng(5);
  const PropositionReport r = PropositionCheck(m, d, 1000, rng);
  ASSERT_EQ(r.pairs.size(), 1000u);
  EXPECT_TRUE(std::isfinite(r.bound_constant));
  double recomputed = 0.0;
  int self = 0;
  for (const auto& p : r.pairs) {
    const Eigen::VectorXd z = m.psi.row(p.s_plus).transpose();
    const double v = std::abs(
        m.phi.row(p.s).dot(m.Transition(z) * m.psi.row(p.s_plus).transpose()));
    const double delta = (m.psi.row(p.s) - m.psi.row(p.s_plus)).norm();
    EXPECT_NEAR(p.abs_value, v, 1e-12);
    EXPECT_NEAR(p.delta, delta, 1e-12);
    if (delta > 0.0) {
      recomputed = std::max(recomputed, v / delta);
      EXPECT_LE(v, r.bound_constant * delta * (1.0 + 1e-12));
    } else {
      EXPECT_EQ(p.s, p.s_plus);
    }
    self += p.s == p.s_plus ? 1 : 0;
  }
  EXPECT_DOUBLE_EQ(r.bound_constant, recomputed);
  EXPECT_EQ(r.self_pairs, self);
}

TEST(IntentCheckpoint, SaveLoadRoundTrip) {
  Rng rng(6);
  const IntentModel m = IntentModel::RandomUniform(5, 3, 1.0, rng);
  const auto path =
      std::filesystem::temp_directory_path() / "ailot_intent_roundtrip.json";
  SaveIntentModel(m, path);
  EXPECT_EQ(LoadIntentModel(path), m);
  EXPECT_THROW(LoadIntentModel(path.string() + ".missing"), IoError);
}

}  // namespace
}  // namespace ailot
