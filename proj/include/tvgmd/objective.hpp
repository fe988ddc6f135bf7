#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "tvgmd/error.hpp"
#include "tvgmd/graph.hpp"
#include "tvgmd/graph_learner.hpp"
#include "tvgmd/signal.hpp"
#include "tvgmd/spectral.hpp"

namespace tvgmd {

/// Bandwidth penalty of one mode spectrum around omega, matching the per-bin
/// quadratic 2 (omega_f - omega)^2 |g_f|^2 that the mode update minimizes.
/// Normalized by Parseval so it is measured in original-length energy units.
inline double bandwidth_penalty(const HalfSpectrum& spec, double omega, Eigen::Index t_original) {
  double sum = 0.0;
  const Eigen::Index last = spec.size() - 1;
  const bool has_nyquist = spec.t_ext % 2 == 0;
  for (Eigen::Index f = 0; f <= last; ++f) {
    const double weight = (f == 0 || (has_nyquist && f == last)) ? 1.0 : 2.0;
    const double offset = spec.frequency(f) - omega;
    sum += weight * 2.0 * offset * offset * std::norm(spec.bins[f]);
  }
  const double t_ext = static_cast<double>(spec.t_ext);
  return sum / t_ext * (static_cast<double>(t_original) / t_ext);
}

/// Graph part of the augmented Lagrangian for one mode. Missing weights count
/// as an empty graph, whose log barrier is +inf.
inline double graph_penalty(const Eigen::MatrixXd& mode_samples, const Eigen::VectorXd& w,
                            const DecompositionConfig& config) {
  const Eigen::VectorXd z = pairwise_distances(mode_samples, config.normalize_distances);
  if (w.size() == 0) return std::numeric_limits<double>::infinity();
  return graph_objective(w, z, config.beta, config.gamma);
}

/// h1 + h2: bandwidth, reconstruction, and dual terms plus, when beta > 0, the
/// per-mode graph terms. Used for monitoring only.
inline double objective_value(const SpectralModeSet& spectra, const std::vector<GraphMode>& modes,
                              const TimeVaryingGraphSignal& signal,
                              const DecompositionConfig& config) {
  const Eigen::Index n_nodes = signal.n_nodes();
  const Eigen::Index t = signal.n_samples();
  const std::size_t k_count = modes.size();
  if (spectra.mode_spectra.size() != k_count || spectra.omegas.size() != k_count ||
      spectra.dual_spectra.size() != static_cast<std::size_t>(n_nodes)) {
    throw Error(ErrorKind::DimensionMismatch, "spectra and modes disagree on K or N");
  }

  Eigen::MatrixXd residual = signal.samples;
  double bandwidth = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto& mode = modes[k];
    if (mode.mode_samples.rows() != n_nodes || mode.mode_samples.cols() != t ||
        spectra.mode_spectra[k].size() != static_cast<std::size_t>(n_nodes)) {
      throw Error(ErrorKind::DimensionMismatch, "mode dimensions do not match the signal");
    }
    residual -= mode.mode_samples;
    for (Eigen::Index n = 0; n < n_nodes; ++n) {
      bandwidth += bandwidth_penalty(spectra.mode_spectra[k][static_cast<std::size_t>(n)],
                                     spectra.omegas[k], t);
    }
  }

  double dual = 0.0;
  for (Eigen::Index n = 0; n < n_nodes; ++n) {
    const auto& lambda_hat = spectra.dual_spectra[static_cast<std::size_t>(n)];
    if (lambda_hat.bins.isZero(0.0)) continue;
    const bool mirror = lambda_hat.t_ext == 2 * t;
    const Eigen::VectorXd lambda = from_half_spectrum(lambda_hat, t, mirror);
    dual += lambda.dot(residual.row(n).transpose());
  }

  double total = config.alpha * bandwidth + residual.squaredNorm() + dual;
  if (config.beta > 0.0) {
    for (const auto& mode : modes) {
      total += graph_penalty(mode.mode_samples, mode.edge_weights, config);
    }
  }
  return total;
}

}  // namespace tvgmd
