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

#include "ailot/ot.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ailot/error.h"

namespace ailot {
namespace {

// -eps * log sum_k exp((h_k - c_k) / eps), stabilized by the max exponent.
double SoftMin(const double* c, const double* h, Eigen::Index n, double eps) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) best = std::max(best, h[k] - c[k]);
  double sum = 0.0;
  const double inv_eps = 1.0 / eps;
  for (Eigen::Index k = 0; k < n; ++k) {
    sum += std::exp((h[k] - c[k] - best) * inv_eps);
  }
  return -(best + eps * std::log(sum));
}

}  // namespace

CostMatrix BuildCostMatrix(const Eigen::MatrixXd& agent_intents,
                           const Eigen::MatrixXd& expert_intents, int k) {
  const Eigen::Index ta = agent_intents.rows();
  const Eigen::Index te = expert_intents.rows();
  if (ta < 1 || te < 1) throw InputError("trajectories must be nonempty");
  if (agent_intents.cols() != expert_intents.cols()) {
    throw InputError("agent and expert intents differ in dimension");
  }
  if (k < 1) throw InputError("lookahead k must be >= 1");

  Eigen::MatrixXd sq(ta, te);
  for (Eigen::Index j = 0; j < te; ++j) {
    for (Eigen::Index i = 0; i < ta; ++i) {
      sq(i, j) = (agent_intents.row(i) - expert_intents.row(j)).squaredNorm();
    }
  }
  CostMatrix cost;
  cost.k = k;
  cost.values.resize(ta, te);
  for (Eigen::Index j = 0; j < te; ++j) {
    const Eigen::Index jn = std::min<Eigen::Index>(j + k, te - 1);
    for (Eigen::Index i = 0; i < ta; ++i) {
      const Eigen::Index in = std::min<Eigen::Index>(i + k, ta - 1);
      cost.values(i, j) = sq(i, j) + sq(in, jn);
    }
  }
  return cost;
}

int TailIndex(const CostMatrix& cost) {
  if (cost.values.size() == 0) throw InputError("empty cost matrix");
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < cost.values.cols(); ++j) {
    if (cost.values(0, j) < cost.values(0, best)) best = j;
  }
  return static_cast<int>(best);
}

TransportPlan Sinkhorn(const Eigen::MatrixXd& cost,
                       const SinkhornOptions& options) {
  if (!(options.epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (options.max_iters < 1) throw InputError("max_iters must be >= 1");
  if (!(options.tolerance > 0.0)) {
    throw InputError("tolerance must be positive");
  }
  const Eigen::Index n = cost.rows();
  const Eigen::Index m = cost.cols();
  if (n == 0 || m == 0) throw InputError("empty cost matrix");
  if (!cost.allFinite()) throw InputError("cost must be finite");

  const double eps = options.epsilon;
  const double log_a = -std::log(static_cast<double>(n));
  const double log_b = -std::log(static_cast<double>(m));

  // Geometric schedule eps0 * ratio^t reaching eps after `anneal` iterations.
  const double range = cost.maxCoeff() - cost.minCoeff();
  int anneal = 0;
  double ratio = 1.0;
  if (options.epsilon_scaling && range > eps && options.max_iters >= 2) {
    anneal = options.max_iters / 2;
    ratio = std::pow(eps / range, 1.0 / anneal);
  }
  auto eps_at = [&](int it) {
    return it < anneal ? std::max(eps, range * std::pow(ratio, it)) : eps;
  };

  const Eigen::MatrixXd cost_t = cost.transpose();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd f_next(n);

  auto row_update = [&](double e, const Eigen::VectorXd& h,
                        Eigen::VectorXd& out) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i) = e * log_a + SoftMin(cost_t.col(i).data(), h.data(), m, e);
    }
  };
  auto col_update = [&](double e) {
    for (Eigen::Index j = 0; j < m; ++j) {
      g(j) = e * log_b + SoftMin(cost.col(j).data(), f.data(), n, e);
    }
  };
  auto check_finite = [&](int it) {
    if (!g.allFinite() || !f.allFinite()) {
      throw NumericalError("non-finite dual potential", it);
    }
  };

  const int newton = std::clamp(options.newton_steps, 0,
                                std::max(0, (options.max_iters - anneal) / 2));
  const int sinkhorn_iters = options.max_iters - newton;
  const double a = 1.0 / static_cast<double>(n);
  const double b = 1.0 / static_cast<double>(m);

  row_update(eps_at(0), g, f);
  int iterations = 0;
  bool converged = false;
  for (int it = 0; it < sinkhorn_iters; ++it) {
    const double e = eps_at(it);
    col_update(e);
    row_update(e, g, f_next);
    iterations = it + 1;
    f.swap(f_next);
    check_finite(iterations);
    if (it >= anneal) {
      // Row sums of the plan before the row update are a * exp((f_old - f) / e).
      double row_error = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        row_error =
            std::max(row_error, std::abs(a * std::exp((f_next(i) - f(i)) / e) - a));
      }
      if (row_error <= options.tolerance) {
        converged = true;
        break;
      }
    }
  }

  // Newton ascent on the semi-dual in g, f row-exact. Hessian is
  // -(diag(colsum) - P^T P / a) / eps; Armijo backtracking on the dual value.
  Eigen::MatrixXd p(n, m);
  auto fill_plan = [&](const Eigen::VectorXd& rows, const Eigen::VectorXd& cols) {
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        p(i, j) = std::exp((rows(i) + cols(j) - cost(i, j)) / eps);
      }
    }
  };
  for (int step = 0; step < newton && !converged; ++step) {
    fill_plan(f, g);
    const Eigen::VectorXd col_sum = p.colwise().sum().transpose();
    const Eigen::VectorXd grad = Eigen::VectorXd::Constant(m, b) - col_sum;
    if (grad.cwiseAbs().maxCoeff() <= options.tolerance) break;
    Eigen::MatrixXd hess = -(p.transpose() * p) / a;
    hess.diagonal() += col_sum;
    hess.diagonal().array() += 1e-12 * col_sum.maxCoeff();
    const Eigen::VectorXd dir = eps * hess.ldlt().solve(grad);
    const double slope = grad.dot(dir);
    if (!dir.allFinite() || !(slope > 0.0)) break;

    const double dual = a * f.sum() + b * g.sum();
    const double col_error = grad.cwiseAbs().maxCoeff();
    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd g_try(m);
    for (int ls = 0; ls < 40; ++ls) {
      g_try = g + t * dir;
      row_update(eps, g_try, f_next);
      if (a * f_next.sum() + b * g_try.sum() >= dual + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      // Or a halved column error.
      fill_plan(f_next, g_try);
      const double try_error =
          (p.colwise().sum().transpose().array() - b).abs().maxCoeff();
      if (try_error < 0.5 * col_error) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    g.swap(g_try);
    f.swap(f_next);
    iterations = sinkhorn_iters + step + 1;
    check_finite(iterations);
  }

  TransportPlan plan;
  plan.epsilon = eps;
  plan.iterations_run = iterations;
  plan.values.resize(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      plan.values(i, j) = std::exp((f(i) + g(j) - cost(i, j)) / eps);
    }
  }
  const double row_dev =
      (plan.values.rowwise().sum().array() - 1.0 / n).abs().maxCoeff();
  const double col_dev =
      (plan.values.colwise().sum().array() - 1.0 / m).abs().maxCoeff();
  plan.marginal_error = std::max(row_dev, col_dev);
  plan.row_potential = std::move(f);
  plan.col_potential = std::move(g);
  return plan;
}

double TransportCost(const Eigen::MatrixXd& plan, const Eigen::MatrixXd& cost) {
  if (plan.rows() != cost.rows() || plan.cols() != cost.cols()) {
    throw InputError("plan and cost shapes differ");
  }
  return plan.cwiseProduct(cost).sum();
}

ExactOtResult ExactOtBruteForce(const Eigen::MatrixXd& cost) {
  const Eigen::Index n = cost.rows();
  if (n != cost.cols()) throw InputError("brute-force OT needs a square cost");
  if (n < 1 || n > 8) throw InputError("brute-force OT supports 1 <= n <= 8");

  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  ExactOtResult best;
  best.value = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += cost(i, sigma[i]);
    const double value = total / static_cast<double>(n);
    if (value < best.value) {
      best.value = value;
      best.permutation = sigma;
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  best.plan = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    best.plan(i, best.permutation[i]) = 1.0 / static_cast<double>(n);
  }
  return best;
}

std::string TransportDebugCsv(const Eigen::MatrixXd& cost,
                              const TransportPlan& plan) {
  std::ostringstream out;
  out.precision(17);
  out << "kind,i,j,value\n";
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      out << "cost," << i << ',' << j << ',' << cost(i, j) << '\n';
    }
  }
  for (Eigen::Index i = 0; i < plan.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.values.cols(); ++j) {
      out << "plan," << i << ',' << j << ',' << plan.values(i, j) << '\n';
    }
  }
  for (Eigen::Index i = 0; i < plan.row_potential.size(); ++i) {
    out << "row_dual," << i << ",," << plan.row_potential(i) << '\n';
  }
  for (Eigen::Index j = 0; j < plan.col_potential.size(); ++j) {
    out << "col_dual,," << j << ',' << plan.col_potential(j) << '\n';
  }
  return out.str();
}

}  // namespace ailot
