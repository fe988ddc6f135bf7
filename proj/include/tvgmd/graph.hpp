#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cassert>
#include <cmath>
#include <string>
#include <utility>

#include "tvgmd/error.hpp"

namespace tvgmd {

/// Canonical edge layout: the N(N-1)/2 pairs (m, n), m < n, enumerated row by
/// row of the upper triangle. Every edge vector and file uses this order.
class EdgeIndexing {
 public:
  explicit EdgeIndexing(Eigen::Index n_nodes) : n_nodes_(n_nodes) {}

  Eigen::Index n_nodes() const { return n_nodes_; }
  Eigen::Index edge_count() const { return n_nodes_ * (n_nodes_ - 1) / 2; }

  Eigen::Index index(Eigen::Index m, Eigen::Index n) const {
    if (m > n) std::swap(m, n);
    assert(m != n && n < n_nodes_);
    // Row m starts after the m previous rows of lengths N-1, N-2, ...
    return m * (2 * n_nodes_ - m - 1) / 2 + (n - m - 1);
  }

  std::pair<Eigen::Index, Eigen::Index> pair(Eigen::Index e) const {
    Eigen::Index m = 0;
    Eigen::Index row_start = 0;
    while (e >= row_start + (n_nodes_ - m - 1)) {
      row_start += n_nodes_ - m - 1;
      ++m;
    }
    return {m, m + 1 + (e - row_start)};
  }

  // Calls fn(e, m, n) for every edge in canonical order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    Eigen::Index e = 0;
    for (Eigen::Index m = 0; m < n_nodes_; ++m) {
      for (Eigen::Index n = m + 1; n < n_nodes_; ++n) fn(e++, m, n);
    }
  }

 private:
  Eigen::Index n_nodes_;
};

/// Number of nodes whose edge vector has length m, or -1 if m is not
/// triangular.
inline Eigen::Index nodes_for_edge_count(Eigen::Index m) {
  const auto n = static_cast<Eigen::Index>(std::llround((1.0 + std::sqrt(1.0 + 8.0 * m)) / 2.0));
  return n * (n - 1) / 2 == m ? n : -1;
}

inline void require_edge_length(const Eigen::VectorXd& w, Eigen::Index n_nodes) {
  if (w.size() != n_nodes * (n_nodes - 1) / 2) {
    throw Error(ErrorKind::DimensionMismatch,
                "edge vector has length " + std::to_string(w.size()) + ", expected " +
                    std::to_string(n_nodes * (n_nodes - 1) / 2) + " for " +
                    std::to_string(n_nodes) + " nodes");
  }
}

/// Node degrees Qw; Q is never materialized.
inline Eigen::VectorXd apply_q(const Eigen::VectorXd& w, Eigen::Index n_nodes) {
  require_edge_length(w, n_nodes);
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(n_nodes);
  EdgeIndexing(n_nodes).for_each([&](Eigen::Index e, Eigen::Index m, Eigen::Index n) {
    degree[m] += w[e];
    degree[n] += w[e];
  });
  return degree;
}

/// Q^T d: each edge (m, n) receives d[m] + d[n].
inline Eigen::VectorXd apply_q_transpose(const Eigen::VectorXd& d) {
  const Eigen::Index n_nodes = d.size();
  EdgeIndexing edges(n_nodes);
  Eigen::VectorXd out(edges.edge_count());
  edges.for_each([&](Eigen::Index e, Eigen::Index m, Eigen::Index n) { out[e] = d[m] + d[n]; });
  return out;
}

/// ||Q||_2 = sqrt(2 (N - 1)): each node touches N-1 edges.
inline double q_operator_norm(Eigen::Index n_nodes) {
  return std::sqrt(2.0 * static_cast<double>(n_nodes - 1));
}

struct DenseGraph {
  Eigen::MatrixXd adjacency;
  Eigen::VectorXd degree;
  Eigen::MatrixXd laplacian;

  Eigen::Index n_nodes() const { return adjacency.rows(); }
};

inline DenseGraph densify(const Eigen::VectorXd& w, Eigen::Index n_nodes) {
  require_edge_length(w, n_nodes);
  DenseGraph g;
  g.adjacency = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
  EdgeIndexing(n_nodes).for_each([&](Eigen::Index e, Eigen::Index m, Eigen::Index n) {
    if (!(w[e] >= 0.0)) {
      throw Error(ErrorKind::NegativeWeight, "edge (" + std::to_string(m) + ", " +
                                                 std::to_string(n) +
                                                 ") has a negative or NaN weight");
    }
    g.adjacency(m, n) = w[e];
    g.adjacency(n, m) = w[e];
  });
  g.degree = apply_q(w, n_nodes);
  g.laplacian = -g.adjacency;
  g.laplacian.diagonal() = g.degree;
  return g;
}

/// Upper-triangular entries of a symmetric adjacency matrix in canonical order.
inline Eigen::VectorXd vectorize(const Eigen::MatrixXd& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "adjacency must be square");
  }
  EdgeIndexing edges(adjacency.rows());
  Eigen::VectorXd w(edges.edge_count());
  edges.for_each([&](Eigen::Index e, Eigen::Index m, Eigen::Index n) { w[e] = adjacency(m, n); });
  return w;
}

/// z[e] = ||u_m - u_n||^2 for each edge. With normalize, z is divided by its
/// mean when that mean is positive.
inline Eigen::VectorXd pairwise_distances(const Eigen::MatrixXd& mode, bool normalize = false) {
  if (!mode.allFinite()) {
    throw Error(ErrorKind::NonFiniteInput, "mode contains NaN or Inf samples");
  }
  EdgeIndexing edges(mode.rows());
  Eigen::VectorXd z(edges.edge_count());
  edges.for_each([&](Eigen::Index e, Eigen::Index m, Eigen::Index n) {
    z[e] = (mode.row(m) - mode.row(n)).squaredNorm();
  });
  if (normalize && z.size() > 0) {
    const double mean = z.mean();
    if (mean > 0.0) z /= mean;
  }
  return z;
}

/// Tr(U^T L U), which equals half the W-weighted sum of squared row distances.
inline double smoothness(const Eigen::MatrixXd& mode, const DenseGraph& graph) {
  if (mode.rows() != graph.n_nodes()) {
    throw Error(ErrorKind::DimensionMismatch, "mode rows do not match graph size");
  }
  const double trace = (mode.transpose() * graph.laplacian * mode).trace();
#ifndef NDEBUG
  double weighted = 0.0;
  for (Eigen::Index m = 0; m < mode.rows(); ++m) {
    for (Eigen::Index n = 0; n < mode.rows(); ++n) {
      weighted += graph.adjacency(m, n) * (mode.row(m) - mode.row(n)).squaredNorm();
    }
  }
  assert(std::abs(trace - 0.5 * weighted) <= 1e-9 * std::max(1.0, std::abs(trace)));
#endif
  return trace;
}

/// Solves (I + beta L) U = F with one Cholesky factorization shared by all
/// T columns.
inline Eigen::MatrixXd geodesic_update(const Eigen::MatrixXd& rhs, const DenseGraph& graph,
                                       double beta) {
  if (rhs.rows() != graph.n_nodes()) {
    throw Error(ErrorKind::DimensionMismatch, "right-hand side rows do not match graph size");
  }
  if (!(beta >= 0.0)) throw Error(ErrorKind::BadParameter, "beta must be ≥ 0");
  if (beta == 0.0) return rhs;
  const Eigen::Index n = graph.n_nodes();
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) + beta * graph.laplacian;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SolveFailure, "I + beta L is not positive definite");
  }
  Eigen::MatrixXd out = llt.solve(rhs);
  if (!out.allFinite()) {
    throw Error(ErrorKind::SolveFailure, "geodesic solve produced non-finite values");
  }
  return out;
}

}  // namespace tvgmd
