#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

#include "tvgmd/error.hpp"
#include "tvgmd/graph.hpp"

namespace tvgmd {

/// 2 beta w^T z + gamma ||w||^2 - sum_n log((Qw)_n); +inf when any degree is
/// nonpositive.
inline double graph_objective(const Eigen::VectorXd& w, const Eigen::VectorXd& z, double beta,
                              double gamma) {
  const Eigen::Index n_nodes = nodes_for_edge_count(w.size());
  if (n_nodes < 2 || z.size() != w.size()) {
    throw Error(ErrorKind::DimensionMismatch, "edge vectors w and z do not match");
  }
  const Eigen::VectorXd degree = apply_q(w, n_nodes);
  if ((degree.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
  // Skip edges with w = 0 so an infinite distance on an unused edge adds 0.
  double linear = 0.0;
  for (Eigen::Index e = 0; e < w.size(); ++e) {
    if (w[e] != 0.0) linear += w[e] * z[e];
  }
  return 2.0 * beta * linear + gamma * w.squaredNorm() - degree.array().log().sum();
}

/// Default FBF step: 0.9 / (2 gamma + ||Q||_2), inside the (0, 1/mu) range.
inline double default_learner_step(Eigen::Index n_nodes, double gamma) {
  return 0.9 / (2.0 * gamma + q_operator_norm(n_nodes));
}

struct LearnerState {
  Eigen::VectorXd w;  // primal edge weights
  Eigen::VectorXd d;  // dual, degree space
  int iteration = 0;
  double delta = 0.0;
  bool converged = false;
};

/// One forward-backward-forward primal-dual step on (state.w, state.d):
///
///   y  = w - delta (2 gamma w + Q^T d)      ybar = d + delta Q w
///   p  = max(0, y - 2 beta delta z)         pbar = (ybar - sqrt(ybar^2 + 4 delta)) / 2
///   q  = p - delta (2 gamma p + Q^T pbar)   qbar = pbar + delta Q p
///   w' = w - y + q                          d'   = d - ybar + qbar
inline void fbf_step(LearnerState& state, const Eigen::VectorXd& z, double beta, double gamma) {
  const Eigen::Index n_nodes = state.d.size();
  const double delta = state.delta;
  const Eigen::VectorXd y = state.w - delta * (2.0 * gamma * state.w + apply_q_transpose(state.d));
  const Eigen::VectorXd y_bar = state.d + delta * apply_q(state.w, n_nodes);

  // beta = 0 must not turn an infinite distance into NaN.
  const Eigen::VectorXd p =
      beta > 0.0 ? Eigen::VectorXd((y - 2.0 * beta * delta * z).cwiseMax(0.0)) : y.cwiseMax(0.0);
  const Eigen::VectorXd p_bar =
      0.5 * (y_bar.array() - (y_bar.array().square() + 4.0 * delta).sqrt()).matrix();

  const Eigen::VectorXd q = p - delta * (2.0 * gamma * p + apply_q_transpose(p_bar));
  const Eigen::VectorXd q_bar = p_bar + delta * apply_q(p, n_nodes);

  state.w += q - y;
  state.d += q_bar - y_bar;
  ++state.iteration;
}

/// Fresh learner state: w from w_init (clamped at 0), d = 1, default step.
inline LearnerState start_learner(const Eigen::VectorXd& w_init, Eigen::Index n_nodes,
                                  double gamma) {
  LearnerState state;
  state.delta = default_learner_step(n_nodes, gamma);
  state.w = w_init.cwiseMax(0.0);
  state.d = Eigen::VectorXd::Ones(n_nodes);
  return state;
}

/// Minimizes 2 beta w^T z + gamma ||w||^2 - 1^T log(Qw) over w >= 0 by
/// repeating fbf_step. The primal iterate may dip below zero mid-run; the
/// returned w is projected onto w >= 0. Stops once both relative changes of w
/// and d drop below eps. On hitting max_iter the lowest-objective iterate seen
/// is returned with converged false.
inline LearnerState learn_graph(const Eigen::VectorXd& z, double beta, double gamma,
                                const Eigen::VectorXd& w_init, int max_iter, double eps) {
  const Eigen::Index n_nodes = nodes_for_edge_count(z.size());
  if (n_nodes < 2) {
    throw Error(ErrorKind::DegenerateInput,
                "graph learning needs at least 2 nodes (edge vector length " +
                    std::to_string(z.size()) + ")");
  }
  if (w_init.size() != z.size()) {
    throw Error(ErrorKind::DimensionMismatch, "initial weights and distances differ in length");
  }
  if ((z.array() < 0.0).any() || z.array().isNaN().any()) {
    throw Error(ErrorKind::BadParameter, "distances must be nonnegative");
  }
  if (!(beta >= 0.0) || !(gamma >= 0.0)) {
    throw Error(ErrorKind::BadParameter, "beta and gamma must be nonnegative");
  }
  if (z.array().isInf().all()) {
    throw Error(ErrorKind::DegenerateInput, "every pairwise distance is infinite");
  }
  if (gamma == 0.0 && (beta == 0.0 || (z.array() == 0.0).any())) {
    throw Error(ErrorKind::DegenerateInput,
                "objective is unbounded below with gamma = 0 and a zero-cost edge");
  }

  LearnerState state = start_learner(w_init, n_nodes, gamma);
  Eigen::VectorXd best_w = state.w;
  Eigen::VectorXd best_d = state.d;
  double best_objective = graph_objective(state.w, z, beta, gamma);

  for (int i = 1; i <= max_iter; ++i) {
    const Eigen::VectorXd w_prev = state.w;
    const Eigen::VectorXd d_prev = state.d;
    fbf_step(state, z, beta, gamma);

    const double w_norm = w_prev.norm();
    const double d_norm = d_prev.norm();
    const double w_change = w_norm > 0.0 ? (state.w - w_prev).norm() / w_norm
                                         : std::numeric_limits<double>::infinity();
    const double d_change = d_norm > 0.0 ? (state.d - d_prev).norm() / d_norm
                                         : std::numeric_limits<double>::infinity();
    if (w_change < eps && d_change < eps) {
      state.converged = true;
      state.w = state.w.cwiseMax(0.0);
      return state;
    }
    const Eigen::VectorXd feasible = state.w.cwiseMax(0.0);
    const double objective = graph_objective(feasible, z, beta, gamma);
    if (objective < best_objective) {
      best_objective = objective;
      best_w = feasible;
      best_d = state.d;
    }
  }

  state.w = std::isfinite(best_objective) ? best_w : state.w.cwiseMax(0.0);
  if (std::isfinite(best_objective)) state.d = best_d;
  state.converged = false;
  return state;
}

}  // namespace tvgmd
