#pragma once

// Reference computations used by the unit and acceptance suites. Nothing here
// calls into the library's own operators.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <random>

namespace oracles {

/// Dense N x M incidence-sum matrix: column e has ones at rows m and n.
inline Eigen::MatrixXd dense_q(Eigen::Index n_nodes) {
  const Eigen::Index m_edges = n_nodes * (n_nodes - 1) / 2;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n_nodes, m_edges);
  Eigen::Index e = 0;
  for (Eigen::Index i = 0; i < n_nodes; ++i) {
    for (Eigen::Index j = i + 1; j < n_nodes; ++j, ++e) {
      q(i, e) = 1.0;
      q(j, e) = 1.0;
    }
  }
  return q;
}

inline double learner_objective(const Eigen::MatrixXd& q, const Eigen::VectorXd& w,
                                const Eigen::VectorXd& z, double beta, double gamma) {
  const Eigen::VectorXd deg = q * w;
  if ((deg.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
  return 2.0 * beta * w.dot(z) + gamma * w.squaredNorm() - deg.array().log().sum();
}

/// Projected gradient descent with backtracking on
/// 2 beta w'z + gamma |w|^2 - sum log(Qw), w >= 0.
inline Eigen::VectorXd pgd_learner(const Eigen::VectorXd& z, double beta, double gamma,
                                   Eigen::Index n_nodes, int max_iter = 1'000'000,
                                   double tol = 1e-13) {
  const Eigen::MatrixXd q = dense_q(n_nodes);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(z.size());
  double f = learner_objective(q, w, z, beta, gamma);
  double step = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd deg = q * w;
    const Eigen::VectorXd grad =
        2.0 * beta * z + 2.0 * gamma * w - q.transpose() * deg.cwiseInverse();
    const Eigen::VectorXd mapped = (w - grad).cwiseMax(0.0);
    if ((mapped - w).lpNorm<Eigen::Infinity>() < tol) break;
    step = std::min(1.0, step * 2.0);
    while (true) {
      const Eigen::VectorXd next = (w - step * grad).cwiseMax(0.0);
      const double f_next = learner_objective(q, next, z, beta, gamma);
      const Eigen::VectorXd diff = next - w;
      if (f_next <= f + grad.dot(diff) + diff.squaredNorm() / (2.0 * step)) {
        w = next;
        f = f_next;
        break;
      }
      step *= 0.5;
      if (step < 1e-30) return w;
    }
  }
  return w;
}

/// Two-node closed form of the learner stationarity condition.
inline double two_node_weight(double z, double beta, double gamma) {
  return (-beta * z + std::sqrt(beta * beta * z * z + 4.0 * gamma)) / (2.0 * gamma);
}

/// Minimizes a |g|^2 + |num - g|^2 over complex g one real coordinate at a
/// time, fitting a parabola through three evaluations. Exact for quadratics.
inline std::complex<double> per_bin_minimizer(std::complex<double> num, double a) {
  auto minimize_1d = [&](auto&& cost) {
    const double h = 1.0;
    const double c0 = cost(-h), c1 = cost(0.0), c2 = cost(h);
    return h * (c0 - c2) / (2.0 * (c0 - 2.0 * c1 + c2));
  };
  const double re = minimize_1d([&](double u) {
    return a * u * u + (num.real() - u) * (num.real() - u);
  });
  const double im = minimize_1d([&](double v) {
    return a * v * v + (num.imag() - v) * (num.imag() - v);
  });
  return {re, im};
}

/// Half-weighted sum over ordered pairs of W_mn |u_m - u_n|^2.
inline double pairwise_smoothness(const Eigen::MatrixXd& u, const Eigen::MatrixXd& w) {
  double s = 0.0;
  for (Eigen::Index m = 0; m < u.rows(); ++m) {
    for (Eigen::Index n = 0; n < u.rows(); ++n) s += w(m, n) * (u.row(m) - u.row(n)).squaredNorm();
  }
  return 0.5 * s;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                     double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double lo = -1.0,
                                     double hi = 1.0) {
  return random_matrix(rng, n, 1, lo, hi);
}

}  // namespace oracles
