#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tvgmd/error.hpp"
#include "tvgmd/signal.hpp"

namespace tvgmd {

struct ToneTerm {
  double frequency_hz = 0.0;
  double amplitude = 1.0;  // sign flips the phase by pi
};

struct SynthSpec {
  std::vector<std::vector<ToneTerm>> node_terms;
  double sample_rate_hz = 1024.0;
  double duration_s = 1.0;
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
};

/// Planted component for one frequency: the clean per-node contribution and
/// the grouping of nodes that carry identical (same-amplitude) content.
struct GroundTruthComponent {
  double frequency_hz = 0.0;
  Eigen::VectorXd amplitudes;  // per node, 0 where absent
  Eigen::MatrixXd clean;       // N x T
  std::vector<std::vector<int>> partition;  // 0-based node groups
};

struct GroundTruth {
  std::vector<GroundTruthComponent> components;  // ascending frequency
  Eigen::MatrixXd clean;                         // sum of components
  Eigen::MatrixXd noise;
};

struct SynthOutput {
  TimeVaryingGraphSignal signal;
  GroundTruth truth;
};

/// The 8-node, four-tone benchmark graph signal (2, 24, 48 and 128 Hz) with
/// unit amplitudes, sampled at 1024 Hz for one second.
inline SynthSpec paper_preset() {
  const auto tones = [](std::initializer_list<ToneTerm> t) { return std::vector<ToneTerm>(t); };
  SynthSpec spec;
  spec.node_terms = {
      tones({{2, 1}, {128, 1}}),
      tones({{24, -1}, {48, 1}}),
      tones({{2, 1}, {48, 1}}),
      tones({{24, 1}, {128, 1}}),
      tones({{2, 1}, {24, 1}, {48, 1}, {128, 1}}),
      tones({{48, 1}, {128, 1}}),
      tones({{2, 1}, {24, 1}}),
      tones({{2, 1}, {24, 1}, {48, -1}}),
  };
  spec.sample_rate_hz = 1024.0;
  spec.duration_s = 1.0;
  return spec;
}

inline Eigen::Index synth_sample_count(const SynthSpec& spec) {
  const double count = spec.duration_s * spec.sample_rate_hz;
  const double rounded = std::round(count);
  if (!(spec.sample_rate_hz > 0.0) || !(spec.duration_s > 0.0) ||
      std::abs(count - rounded) > 1e-9 * std::max(1.0, count)) {
    throw Error(ErrorKind::BadParameter,
                "duration_s * sample_rate_hz must be a positive integer");
  }
  return static_cast<Eigen::Index>(rounded);
}

inline SynthOutput generate(const SynthSpec& spec) {
  const Eigen::Index t_count = synth_sample_count(spec);
  const auto n_nodes = static_cast<Eigen::Index>(spec.node_terms.size());
  if (n_nodes < 1) throw Error(ErrorKind::BadParameter, "synth spec has no nodes");
  const double nyquist = spec.sample_rate_hz / 2.0;

  std::map<double, Eigen::VectorXd> amplitudes;
  for (Eigen::Index n = 0; n < n_nodes; ++n) {
    for (const auto& term : spec.node_terms[static_cast<std::size_t>(n)]) {
      if (!(term.frequency_hz >= 0.0) || !(term.frequency_hz < nyquist)) {
        throw Error(ErrorKind::NyquistViolation,
                    "tone at " + std::to_string(term.frequency_hz) +
                        " Hz is not below the Nyquist frequency " + std::to_string(nyquist));
      }
      auto [it, inserted] =
          amplitudes.try_emplace(term.frequency_hz, Eigen::VectorXd::Zero(n_nodes));
      it->second[n] += term.amplitude;
    }
  }

  SynthOutput out;
  out.truth.clean = Eigen::MatrixXd::Zero(n_nodes, t_count);
  const Eigen::ArrayXd time =
      Eigen::ArrayXd::LinSpaced(t_count, 0.0, static_cast<double>(t_count - 1)) /
      spec.sample_rate_hz;

  for (const auto& [frequency, amps] : amplitudes) {
    GroundTruthComponent component;
    component.frequency_hz = frequency;
    component.amplitudes = amps;
    const Eigen::RowVectorXd wave =
        (2.0 * std::numbers::pi * frequency * time).cos().matrix().transpose();
    component.clean = amps * wave;

    std::map<double, std::vector<int>> groups;
    for (Eigen::Index n = 0; n < n_nodes; ++n) groups[amps[n]].push_back(static_cast<int>(n));
    for (auto& [amp, nodes] : groups) component.partition.push_back(std::move(nodes));

    out.truth.clean += component.clean;
    out.truth.components.push_back(std::move(component));
  }

  out.truth.noise = Eigen::MatrixXd::Zero(n_nodes, t_count);
  if (spec.snr_db) {
    const Eigen::VectorXd power = out.truth.clean.rowwise().squaredNorm() / static_cast<double>(t_count);
    const double mean_power = power.mean();
    std::mt19937_64 rng(spec.seed);
    for (Eigen::Index n = 0; n < n_nodes; ++n) {
      const double reference = power[n] > 0.0 ? power[n] : mean_power;
      const double variance = reference / std::pow(10.0, *spec.snr_db / 10.0);
      std::normal_distribution<double> noise(0.0, std::sqrt(variance));
      for (Eigen::Index i = 0; i < t_count; ++i) out.truth.noise(n, i) = noise(rng);
    }
  }

  out.signal.samples = out.truth.clean + out.truth.noise;
  out.signal.sample_rate_hz = spec.sample_rate_hz;
  return out;
}

}  // namespace tvgmd
