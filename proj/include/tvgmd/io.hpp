#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tvgmd/error.hpp"
#include "tvgmd/graph.hpp"
#include "tvgmd/signal.hpp"

namespace tvgmd {

inline constexpr std::string_view format_version = "tvgmd-1";
inline constexpr std::string_view edge_order_name = "upper-triangular-row-major";

struct RunManifest {
  DecompositionConfig config;
  double sample_rate_hz = 0.0;
  std::string input_sha256;
  std::vector<double> center_freqs_hz;
  int iterations = 0;
  bool converged = false;
  double timing_ms = 0.0;  // written to timing.json, not summary.json
  bool baseline = false;   // MVMD (beta forced to 0)
  std::string version{format_version};
};

namespace detail {

inline std::string format_number(double value) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error(ErrorKind::IoError, "cannot format number");
  return std::string(buf.data(), end);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

// Decimal-point numbers only; the whole cell has to parse.
inline bool parse_cell(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc{} && ptr == cell.data() + cell.size();
}

}  // namespace detail

/// Write `contents` to `path` via a sibling temp file and rename.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::IoError, "cannot rename into " + path.string());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// One row per node, comma separated. With `header`, the first line and the
/// first column are labels and are skipped.
inline TimeVaryingGraphSignal read_signal_csv(const std::filesystem::path& path,
                                              double sample_rate_hz, bool header = false) {
  const std::string text = read_file(path);
  std::vector<std::vector<double>> rows;
  std::string_view rest = text;
  std::size_t line_no = 0;
  bool skipped_header = !header;
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (detail::trim(line).empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    auto cells = detail::split_commas(line);
    if (header) cells.erase(cells.begin());
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!detail::parse_cell(cells[c], values[c])) {
        throw Error(ErrorKind::ParseError, path.string() + ": line " + std::to_string(line_no) +
                                               ": non-numeric cell '" + std::string(cells[c]) + "'");
      }
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw Error(ErrorKind::ParseError,
                  path.string() + ": line " + std::to_string(line_no) + ": expected " +
                      std::to_string(rows.front().size()) + " columns, got " +
                      std::to_string(values.size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyFile, path.string() + " contains no data rows");

  TimeVaryingGraphSignal signal;
  signal.sample_rate_hz = sample_rate_hz;
  signal.samples.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      signal.samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return signal;
}

inline std::string format_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ',';
      out += detail::format_number(m(r, c));
    }
    out += '\n';
  }
  return out;
}

/// Shortest round-trip representation, so reading back is exact.
inline void write_signal_csv(const std::filesystem::path& path, const Eigen::MatrixXd& samples) {
  write_file_atomic(path, format_csv(samples));
}

inline std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw Error(ErrorKind::IoError, "sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

inline std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

inline nlohmann::json config_to_json(const DecompositionConfig& c) {
  return {{"k", c.k},
          {"alpha", c.alpha},
          {"beta", c.beta},
          {"gamma", c.gamma},
          {"tau", c.tau},
          {"epsilon", c.epsilon},
          {"max_iter", c.max_iter},
          {"omega_init", std::string(to_string(c.omega_init))},
          {"mirror_extend", c.mirror_extend},
          {"normalize_distances", c.normalize_distances},
          {"graph_max_iter", c.graph_max_iter},
          {"graph_epsilon", c.graph_epsilon}};
}

inline DecompositionConfig config_from_json(const nlohmann::json& j) {
  DecompositionConfig c;
  c.k = j.at("k").get<int>();
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.tau = j.at("tau").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.max_iter = j.at("max_iter").get<int>();
  c.omega_init = parse_omega_init(j.at("omega_init").get<std::string>());
  c.mirror_extend = j.at("mirror_extend").get<bool>();
  c.normalize_distances = j.at("normalize_distances").get<bool>();
  c.graph_max_iter = j.at("graph_max_iter").get<int>();
  c.graph_epsilon = j.at("graph_epsilon").get<double>();
  return c;
}

inline RunManifest make_manifest(const DecompositionResult& result,
                                 const DecompositionConfig& config, double sample_rate_hz,
                                 std::string input_sha256, bool baseline, double timing_ms) {
  RunManifest m;
  m.config = config;
  m.sample_rate_hz = sample_rate_hz;
  m.input_sha256 = std::move(input_sha256);
  for (const auto& mode : result.modes) m.center_freqs_hz.push_back(mode.center_freq_hz);
  m.iterations = result.iterations;
  m.converged = result.converged;
  m.timing_ms = timing_ms;
  m.baseline = baseline;
  return m;
}

// nlohmann writes NaN and Inf as null.
inline nlohmann::json summary_json(const DecompositionResult& result, const RunManifest& manifest) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& snap : result.trace) {
    nlohmann::json omegas = nlohmann::json::array();
    for (double w : snap.omegas) omegas.push_back(w * manifest.sample_rate_hz);
    trace.push_back({{"iteration", snap.iteration},
                     {"rel_change", snap.rel_change},
                     {"omegas_hz", omegas},
                     {"objective", snap.objective},
                     {"residual_norm", snap.residual_norm}});
  }
  return {{"format_version", manifest.version},
          {"method", manifest.baseline ? "mvmd-baseline" : "tvgmd"},
          {"config", config_to_json(manifest.config)},
          {"sample_rate_hz", manifest.sample_rate_hz},
          {"input_sha256", manifest.input_sha256},
          {"iterations", manifest.iterations},
          {"converged", manifest.converged},
          {"omegas_hz", manifest.center_freqs_hz},
          {"residual_fro_norm", result.residual.norm()},
          {"trace", trace}};
}

inline std::filesystem::path mode_csv_path(const std::filesystem::path& dir, std::size_t k) {
  return dir / ("mode_" + std::to_string(k) + ".csv");
}

inline std::filesystem::path adjacency_path(const std::filesystem::path& dir, std::size_t k) {
  return dir / ("adjacency_" + std::to_string(k) + ".json");
}

/// Writes mode_k.csv and (when graphs were learned) adjacency_k.json for
/// k = 1..K, then summary.json and timing.json. Returns the paths written.
inline std::vector<std::filesystem::path> write_result(const std::filesystem::path& dir,
                                                       const DecompositionResult& result,
                                                       const RunManifest& manifest) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::IoError, "cannot create output directory " + dir.string());
  }
  std::vector<std::filesystem::path> written;
  for (std::size_t k = 0; k < result.modes.size(); ++k) {
    const auto& mode = result.modes[k];
    written.push_back(mode_csv_path(dir, k + 1));
    write_signal_csv(written.back(), mode.mode_samples);
    if (mode.edge_weights.size() > 0) {
      nlohmann::json adj = {{"n_nodes", mode.mode_samples.rows()},
                            {"edge_order", edge_order_name},
                            {"weights", std::vector<double>(mode.edge_weights.begin(),
                                                            mode.edge_weights.end())}};
      written.push_back(adjacency_path(dir, k + 1));
      write_file_atomic(written.back(), adj.dump(2) + "\n");
    }
  }
  written.push_back(dir / "summary.json");
  write_file_atomic(written.back(), summary_json(result, manifest).dump(2) + "\n");
  written.push_back(dir / "timing.json");
  write_file_atomic(written.back(),
                    nlohmann::json{{"timing_ms", manifest.timing_ms}}.dump(2) + "\n");
  return written;
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

/// Returns the edge vector; checks the declared order and length.
inline Eigen::VectorXd read_adjacency_json(const std::filesystem::path& path) {
  const auto j = read_json(path);
  try {
    const auto n = j.at("n_nodes").get<Eigen::Index>();
    if (j.at("edge_order").get<std::string>() != edge_order_name) {
      throw Error(ErrorKind::ParseError, path.string() + ": unknown edge_order");
    }
    const auto weights = j.at("weights").get<std::vector<double>>();
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                                         static_cast<Eigen::Index>(weights.size()));
    if (n < 2 || w.size() != EdgeIndexing(n).edge_count()) {
      throw Error(ErrorKind::ParseError, path.string() + ": weights length does not match n_nodes");
    }
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace tvgmd
