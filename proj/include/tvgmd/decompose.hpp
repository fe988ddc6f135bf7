#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "tvgmd/error.hpp"
#include "tvgmd/graph.hpp"
#include "tvgmd/graph_learner.hpp"
#include "tvgmd/objective.hpp"
#include "tvgmd/parallel.hpp"
#include "tvgmd/signal.hpp"
#include "tvgmd/spectral.hpp"

namespace tvgmd {

namespace detail {

inline HalfSpectrum zero_spectrum(Eigen::Index t_ext) {
  return HalfSpectrum{Eigen::VectorXcd::Zero(half_spectrum_size(t_ext)), t_ext};
}

inline std::vector<double> uniform_omegas(int k) {
  std::vector<double> omegas(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) omegas[static_cast<std::size_t>(i)] = 0.5 * (i + 0.5) / k;
  return omegas;
}

/// K largest local maxima of the node-summed power spectrum, ascending.
/// Missing peaks are filled from the uniform grid.
inline std::vector<double> peak_omegas(const std::vector<HalfSpectrum>& x_hats, int k) {
  const Eigen::Index bins = x_hats.front().size();
  Eigen::VectorXd power = Eigen::VectorXd::Zero(bins);
  for (const auto& spec : x_hats) power += spec.bins.cwiseAbs2();

  std::vector<Eigen::Index> peaks;
  for (Eigen::Index f = 0; f < bins; ++f) {
    const bool above_left = f == 0 || power[f] > power[f - 1];
    const bool above_right = f == bins - 1 || power[f] >= power[f + 1];
    if (above_left && above_right && power[f] > 0.0) peaks.push_back(f);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return power[a] > power[b]; });
  if (peaks.size() > static_cast<std::size_t>(k)) peaks.resize(static_cast<std::size_t>(k));

  std::vector<double> omegas;
  for (auto f : peaks) omegas.push_back(x_hats.front().frequency(f));
  for (double fill : uniform_omegas(k)) {
    if (omegas.size() == static_cast<std::size_t>(k)) break;
    omegas.push_back(fill);
  }
  std::sort(omegas.begin(), omegas.end());
  return omegas;
}

inline constexpr int peak_hold_iterations = 5;

inline std::vector<double> initial_omegas(const DecompositionConfig& config,
                                          const std::vector<HalfSpectrum>& x_hats) {
  switch (config.omega_init) {
    case OmegaInit::zeros: return std::vector<double>(static_cast<std::size_t>(config.k), 0.0);
    case OmegaInit::uniform: return uniform_omegas(config.k);
    case OmegaInit::peaks: return peak_omegas(x_hats, config.k);
  }
  return std::vector<double>(static_cast<std::size_t>(config.k), 0.0);
}

inline Eigen::MatrixXd to_time_domain(const std::vector<HalfSpectrum>& row, Eigen::Index t,
                                      bool mirror) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(row.size()), t);
  for (std::size_t n = 0; n < row.size(); ++n) {
    out.row(static_cast<Eigen::Index>(n)) = from_half_spectrum(row[n], t, mirror).transpose();
  }
  return out;
}

// Sum over nodes and modes of ||new - old||^2 / ||old||^2. A term whose old
// spectrum is zero counts as 0 if unchanged and +inf otherwise.
inline double relative_change(const std::vector<std::vector<HalfSpectrum>>& current,
                              const std::vector<std::vector<HalfSpectrum>>& previous) {
  double total = 0.0;
  for (std::size_t k = 0; k < current.size(); ++k) {
    for (std::size_t n = 0; n < current[k].size(); ++n) {
      const double diff = (current[k][n].bins - previous[k][n].bins).squaredNorm();
      const double base = previous[k][n].bins.squaredNorm();
      if (base > 0.0) {
        total += diff / base;
      } else if (diff > 0.0) {
        return std::numeric_limits<double>::infinity();
      }
    }
  }
  return total;
}

}  // namespace detail

/// Alternates, per iteration: spectral mode updates (Gauss-Seidel over k, then
/// n), center-frequency updates, and, when beta > 0, a geodesic smoothing of
/// each mode on its current graph followed by relearning that graph from the
/// smoothed mode. Dual ascent with tau closes the iteration; the loop stops
/// once the summed relative spectral change falls below epsilon.
inline DecompositionResult decompose(const TimeVaryingGraphSignal& signal,
                                     const DecompositionConfig& config_in) {
  const DecompositionConfig config = validate_config(config_in, signal);
  const Eigen::Index n_nodes = signal.n_nodes();
  const Eigen::Index t = signal.n_samples();
  const auto k_count = static_cast<std::size_t>(config.k);
  const auto node_count = static_cast<std::size_t>(n_nodes);
  const bool mirror = config.mirror_extend;
  const Eigen::Index t_ext = extended_length(t, mirror);
  const bool learn_graphs = config.beta > 0.0;

  std::vector<HalfSpectrum> x_hats(node_count);
  detail::parallel_for(n_nodes, config.threads, [&](std::ptrdiff_t n) {
    x_hats[static_cast<std::size_t>(n)] =
        to_half_spectrum(signal.samples.row(n).transpose(), mirror);
  });

  SpectralModeSet spectra;
  spectra.mode_spectra.assign(k_count,
                              std::vector<HalfSpectrum>(node_count, detail::zero_spectrum(t_ext)));
  spectra.dual_spectra.assign(node_count, detail::zero_spectrum(t_ext));
  spectra.omegas = detail::initial_omegas(config, x_hats);

  const Eigen::Index edge_count = EdgeIndexing(n_nodes).edge_count();
  std::vector<Eigen::VectorXd> weights(
      k_count, learn_graphs ? Eigen::VectorXd::Zero(edge_count) : Eigen::VectorXd());

  // Peak-picked frequencies are held while the mode spectra fill in; otherwise
  // the first sweep hands most of the signal to mode 0 and drags it off its peak.
  const int omega_hold = config.omega_init == OmegaInit::peaks ? detail::peak_hold_iterations : 0;

  DecompositionResult result;
  std::vector<GraphMode> time_modes(k_count);

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    const auto previous = spectra.mode_spectra;

    for (std::size_t k = 0; k < k_count; ++k) {
      detail::parallel_for(n_nodes, config.threads, [&](std::ptrdiff_t n_signed) {
        const auto n = static_cast<std::size_t>(n_signed);
        HalfSpectrum others = detail::zero_spectrum(t_ext);
        for (std::size_t j = 0; j < k_count; ++j) {
          if (j != k) others.bins += spectra.mode_spectra[j][n].bins;
        }
        spectra.mode_spectra[k][n] = update_mode_spectrum(
            x_hats[n], others, spectra.dual_spectra[n], spectra.omegas[k], config.alpha);
      });
    }

    for (std::size_t k = 0; k < k_count && iter > omega_hold; ++k) {
      if (auto omega = update_center_frequency(spectra.mode_spectra[k])) spectra.omegas[k] = *omega;
    }

    if (learn_graphs) {
      std::vector<Eigen::MatrixXd> pre_geodesic(k_count);
      detail::parallel_for(static_cast<std::ptrdiff_t>(k_count), config.threads,
                           [&](std::ptrdiff_t k) {
                             pre_geodesic[static_cast<std::size_t>(k)] = detail::to_time_domain(
                                 spectra.mode_spectra[static_cast<std::size_t>(k)], t, mirror);
                           });
      // Each mode is smoothed on the graph learned in the previous iteration.
      detail::parallel_for(static_cast<std::ptrdiff_t>(k_count), config.threads,
                           [&](std::ptrdiff_t k_signed) {
        const auto k = static_cast<std::size_t>(k_signed);
        time_modes[k].mode_samples =
            geodesic_update(pre_geodesic[k], densify(weights[k], n_nodes), config.beta);
        const Eigen::VectorXd z =
            pairwise_distances(time_modes[k].mode_samples, config.normalize_distances);
        weights[k] = learn_graph(z, config.beta, config.gamma, weights[k], config.graph_max_iter,
                                 config.graph_epsilon)
                         .w;
        for (Eigen::Index n = 0; n < n_nodes; ++n) {
          spectra.mode_spectra[k][static_cast<std::size_t>(n)] =
              to_half_spectrum(time_modes[k].mode_samples.row(n).transpose(), mirror);
        }
      });
    }

    spectra.dual_spectra = update_duals(x_hats, spectra.mode_spectra, spectra.dual_spectra, config.tau);

    detail::parallel_for(static_cast<std::ptrdiff_t>(k_count), config.threads,
                         [&](std::ptrdiff_t k_signed) {
      const auto k = static_cast<std::size_t>(k_signed);
      if (!learn_graphs) {
        time_modes[k].mode_samples = detail::to_time_domain(spectra.mode_spectra[k], t, mirror);
      }
      time_modes[k].edge_weights = weights[k];
      time_modes[k].center_freq_hz = spectra.omegas[k] * signal.sample_rate_hz;
    });

    Eigen::MatrixXd residual = signal.samples;
    for (const auto& mode : time_modes) residual -= mode.mode_samples;

    IterationSnapshot snapshot;
    snapshot.iteration = iter;
    snapshot.rel_change = detail::relative_change(spectra.mode_spectra, previous);
    snapshot.omegas = spectra.omegas;
    snapshot.objective = objective_value(spectra, time_modes, signal, config);
    snapshot.residual_norm = residual.norm();
    result.trace.push_back(snapshot);
    result.iterations = iter;

    if (snapshot.rel_change < config.epsilon) {
      result.converged = true;
      break;
    }
  }

  // Order by ascending center frequency; ties keep their original order.
  std::vector<std::size_t> order(k_count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spectra.omegas[a] < spectra.omegas[b];
  });

  result.modes.reserve(k_count);
  result.residual = signal.samples;
  for (auto k : order) {
    result.residual -= time_modes[k].mode_samples;
    result.modes.push_back(std::move(time_modes[k]));
  }
  return result;
}

/// The multivariate VMD baseline: decompose with beta = 0, no graphs learned.
inline DecompositionResult decompose_mvmd(const TimeVaryingGraphSignal& signal,
                                          DecompositionConfig config) {
  config.beta = 0.0;
  return decompose(signal, config);
}

}  // namespace tvgmd
