#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "tvgmd/error.hpp"

namespace tvgmd {

/// N x T sample matrix; row n is the time series observed at vertex n.
struct TimeVaryingGraphSignal {
  Eigen::MatrixXd samples;
  double sample_rate_hz = 1.0;

  Eigen::Index n_nodes() const { return samples.rows(); }
  Eigen::Index n_samples() const { return samples.cols(); }
};

enum class OmegaInit { zeros, uniform, peaks };

inline std::string_view to_string(OmegaInit init) {
  switch (init) {
    case OmegaInit::zeros: return "zeros";
    case OmegaInit::uniform: return "uniform";
    case OmegaInit::peaks: return "peaks";
  }
  return "zeros";
}

inline OmegaInit parse_omega_init(std::string_view name) {
  if (name == "zeros") return OmegaInit::zeros;
  if (name == "uniform") return OmegaInit::uniform;
  if (name == "peaks") return OmegaInit::peaks;
  throw Error(ErrorKind::BadParameter,
              "omega-init must be one of zeros|uniform|peaks, got '" +
                  std::string(name) + "'");
}

struct DecompositionConfig {
  int k = 4;
  double alpha = 1000.0;  // bandwidth penalty
  double beta = 0.1;      // graph smoothness weight; 0 disables graph learning
  double gamma = 1.0;     // Frobenius penalty on edge weights
  double tau = 0.0;       // dual ascent step
  double epsilon = 1e-7;
  int max_iter = 500;
  OmegaInit omega_init = OmegaInit::peaks;
  bool mirror_extend = true;
  bool normalize_distances = false;
  int graph_max_iter = 2000;
  double graph_epsilon = 1e-5;
  // Worker threads for the independent per-node and per-mode steps. Results
  // do not depend on this value.
  int threads = 1;
};

struct GraphMode {
  Eigen::MatrixXd mode_samples;  // N x T
  double center_freq_hz = 0.0;
  // Upper-triangular row-major edge weights; empty when graph learning is off.
  Eigen::VectorXd edge_weights;
};

struct IterationSnapshot {
  int iteration = 0;
  double rel_change = 0.0;
  std::vector<double> omegas;  // normalized, cycles per sample
  double objective = 0.0;
  double residual_norm = 0.0;  // ||X - sum_k g^(k)||_F
};

struct DecompositionResult {
  std::vector<GraphMode> modes;  // ascending center frequency
  Eigen::MatrixXd residual;
  int iterations = 0;
  bool converged = false;
  std::vector<IterationSnapshot> trace;
};

/// Throws Error(NonFiniteInput | BadDimensions | BadParameter) on the first
/// violated invariant; returns the config unchanged otherwise.
inline DecompositionConfig validate_config(const DecompositionConfig& config,
                                           const TimeVaryingGraphSignal& signal) {
  auto bad = [](const std::string& msg) {
    throw Error(ErrorKind::BadParameter, msg);
  };
  if (config.k < 1) bad("k must be ≥ 1");
  if (!(config.alpha > 0.0) || !std::isfinite(config.alpha)) bad("alpha must be > 0");
  if (!(config.beta >= 0.0) || !std::isfinite(config.beta)) bad("beta must be ≥ 0");
  if (!(config.gamma >= 0.0) || !std::isfinite(config.gamma)) bad("gamma must be ≥ 0");
  if (config.beta > 0.0 && config.gamma == 0.0) {
    // The graph subproblem is unbounded below wherever z vanishes.
    bad("gamma must be > 0 when beta > 0");
  }
  if (!(config.tau >= 0.0) || !std::isfinite(config.tau)) bad("tau must be ≥ 0");
  if (!(config.epsilon > 0.0)) bad("epsilon must be > 0");
  if (config.max_iter < 1) bad("max-iter must be ≥ 1");
  if (config.graph_max_iter < 1) bad("graph-max-iter must be ≥ 1");
  if (!(config.graph_epsilon > 0.0)) bad("graph-epsilon must be > 0");
  if (config.threads < 1) bad("threads must be ≥ 1");

  if (!(signal.sample_rate_hz > 0.0) || !std::isfinite(signal.sample_rate_hz)) {
    bad("sample rate must be > 0");
  }
  if (signal.n_nodes() < 2 || signal.n_samples() < 4) {
    throw Error(ErrorKind::BadDimensions,
                "signal must have at least 2 nodes and 4 samples, got " +
                    std::to_string(signal.n_nodes()) + "x" +
                    std::to_string(signal.n_samples()));
  }
  if (!signal.samples.allFinite()) {
    throw Error(ErrorKind::NonFiniteInput, "signal contains NaN or Inf samples");
  }
  return config;
}

}  // namespace tvgmd
