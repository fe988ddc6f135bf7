#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvgmd/error.hpp"

namespace tvgmd {

/// Nonnegative-frequency half of the DFT of a real series of length t_ext.
/// Bin f sits at normalized frequency f / t_ext (cycles per sample), so the
/// grid spans [0, 0.5]. Keeping only these bins is how the analytic signal of
/// each mode is represented; real series come back by conjugate symmetry.
struct HalfSpectrum {
  Eigen::VectorXcd bins;
  Eigen::Index t_ext = 0;

  Eigen::Index size() const { return bins.size(); }
  double frequency(Eigen::Index f) const {
    return static_cast<double>(f) / static_cast<double>(t_ext);
  }
};

/// Mode spectra indexed [k][n], one dual spectrum per node, and the K center
/// frequencies in cycles per sample.
struct SpectralModeSet {
  std::vector<std::vector<HalfSpectrum>> mode_spectra;
  std::vector<HalfSpectrum> dual_spectra;
  std::vector<double> omegas;
};

inline Eigen::Index half_spectrum_size(Eigen::Index t_ext) { return t_ext / 2 + 1; }

inline Eigen::Index extended_length(Eigen::Index t, bool mirror) {
  return mirror ? 2 * t : t;
}

/// Reflects the first floor(T/2) samples before index 0 and the remaining
/// ceil(T/2) after index T-1, giving a series of length 2T.
inline Eigen::VectorXd mirror_extend(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::Index t = x.size();
  const Eigen::Index head = t / 2;
  const Eigen::Index tail = t - head;
  Eigen::VectorXd ext(2 * t);
  ext.head(head) = x.head(head).reverse();
  ext.segment(head, t) = x;
  ext.tail(tail) = x.tail(tail).reverse();
  return ext;
}

inline HalfSpectrum to_half_spectrum(const Eigen::Ref<const Eigen::VectorXd>& series,
                                     bool mirror) {
  if (series.size() < 4) {
    throw Error(ErrorKind::BadLength, "series must have at least 4 samples, got " +
                                          std::to_string(series.size()));
  }
  Eigen::VectorXd ext = mirror ? mirror_extend(series) : Eigen::VectorXd(series);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  HalfSpectrum out;
  out.t_ext = ext.size();
  fft.fwd(out.bins, ext);
  return out;
}

inline Eigen::VectorXd from_half_spectrum(const HalfSpectrum& spec, Eigen::Index t_original,
                                          bool mirror) {
  if (t_original < 1 || spec.t_ext != extended_length(t_original, mirror) ||
      spec.size() != half_spectrum_size(spec.t_ext)) {
    throw Error(ErrorKind::DimensionMismatch,
                "half spectrum of length " + std::to_string(spec.size()) +
                    " (t_ext " + std::to_string(spec.t_ext) +
                    ") does not match original length " + std::to_string(t_original));
  }
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  Eigen::VectorXd ext;
  fft.inv(ext, spec.bins, spec.t_ext);
  if (!mirror) return ext;
  return ext.segment(t_original / 2, t_original);
}

inline void require_same_grid(const HalfSpectrum& a, const HalfSpectrum& b) {
  if (a.t_ext != b.t_ext || a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "half spectra live on different grids");
  }
}

/// Wiener-style mode update: each bin of (x - others + lambda/2) is divided
/// by 1 + 2 alpha (omega_f - omega_k)^2.
inline HalfSpectrum update_mode_spectrum(const HalfSpectrum& x_hat,
                                         const HalfSpectrum& other_modes_sum,
                                         const HalfSpectrum& lambda_hat, double omega_k,
                                         double alpha) {
  require_same_grid(x_hat, other_modes_sum);
  require_same_grid(x_hat, lambda_hat);
  HalfSpectrum out;
  out.t_ext = x_hat.t_ext;
  out.bins.resize(x_hat.size());
  for (Eigen::Index f = 0; f < x_hat.size(); ++f) {
    const double offset = x_hat.frequency(f) - omega_k;
    out.bins[f] = (x_hat.bins[f] - other_modes_sum.bins[f] + 0.5 * lambda_hat.bins[f]) /
                  (1.0 + 2.0 * alpha * offset * offset);
  }
  return out;
}

/// Power-weighted mean frequency over all nodes of one mode. Empty when every
/// bin is zero; the caller then keeps its previous center frequency.
inline std::optional<double> update_center_frequency(std::span<const HalfSpectrum> mode_row) {
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& spec : mode_row) {
    for (Eigen::Index f = 0; f < spec.size(); ++f) {
      const double power = std::norm(spec.bins[f]);
      weighted += spec.frequency(f) * power;
      total += power;
    }
  }
  if (!(total > 0.0) || !std::isfinite(total)) return std::nullopt;
  return weighted / total;
}

/// lambda_n += tau (x_n - sum_k g_n^(k)) per node and bin.
inline std::vector<HalfSpectrum> update_duals(
    std::span<const HalfSpectrum> x_hats,
    const std::vector<std::vector<HalfSpectrum>>& mode_spectra,
    std::span<const HalfSpectrum> dual_spectra, double tau) {
  if (dual_spectra.size() != x_hats.size()) {
    throw Error(ErrorKind::DimensionMismatch, "dual and signal node counts differ");
  }
  std::vector<HalfSpectrum> out(dual_spectra.begin(), dual_spectra.end());
  if (tau == 0.0) return out;
  for (std::size_t n = 0; n < x_hats.size(); ++n) {
    require_same_grid(x_hats[n], dual_spectra[n]);
    Eigen::VectorXcd residual = x_hats[n].bins;
    for (const auto& row : mode_spectra) {
      if (row.size() != x_hats.size()) {
        throw Error(ErrorKind::DimensionMismatch, "mode row has wrong node count");
      }
      require_same_grid(x_hats[n], row[n]);
      residual -= row[n].bins;
    }
    out[n].bins += tau * residual;
  }
  return out;
}

/// Fraction of a mode's spectral energy (summed over nodes) that lies within
/// max(5 bins, 0.02 t_ext) of omega.
inline double spectral_concentration(std::span<const HalfSpectrum> mode_row, double omega) {
  double inside = 0.0;
  double total = 0.0;
  for (const auto& spec : mode_row) {
    const double half_width =
        std::max(5.0, 0.02 * static_cast<double>(spec.t_ext)) / static_cast<double>(spec.t_ext);
    for (Eigen::Index f = 0; f < spec.size(); ++f) {
      const double power = std::norm(spec.bins[f]);
      total += power;
      if (std::abs(spec.frequency(f) - omega) <= half_width) inside += power;
    }
  }
  return total > 0.0 ? inside / total : 0.0;
}

/// Time-domain energy of the series a half spectrum came from (Parseval).
inline double half_spectrum_energy(const HalfSpectrum& spec) {
  double energy = 0.0;
  const Eigen::Index last = spec.size() - 1;
  const bool has_nyquist = spec.t_ext % 2 == 0;
  for (Eigen::Index f = 0; f <= last; ++f) {
    const double weight = (f == 0 || (has_nyquist && f == last)) ? 1.0 : 2.0;
    energy += weight * std::norm(spec.bins[f]);
  }
  return energy / static_cast<double>(spec.t_ext);
}

}  // namespace tvgmd
