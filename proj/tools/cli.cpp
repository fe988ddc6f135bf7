#include "cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "tvgmd/tvgmd.hpp"

namespace tvgmd::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct SynthArgs {
  std::string preset;
  std::string spec_path;
  std::optional<double> snr_db;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct DecomposeArgs {
  std::string input;
  double fs = 0.0;
  std::string out;
  DecompositionConfig config;
  std::string omega_init{to_string(DecompositionConfig{}.omega_init)};
  bool mvmd = false;
  bool no_mirror = false;
  bool header = false;
  int threads = 0;  // 0: TVGMD_THREADS, else all cores
};

struct InspectArgs {
  std::string dir;
  bool edges = false;
  bool plot_data = false;
};

SynthSpec synth_spec_from_json(const json& j) {
  SynthSpec spec;
  spec.sample_rate_hz = j.value("sample_rate_hz", spec.sample_rate_hz);
  spec.duration_s = j.value("duration_s", spec.duration_s);
  if (j.contains("snr_db") && !j.at("snr_db").is_null()) spec.snr_db = j.at("snr_db").get<double>();
  spec.seed = j.value("seed", spec.seed);
  for (const auto& node : j.at("nodes")) {
    std::vector<ToneTerm> terms;
    for (const auto& term : node) {
      terms.push_back({term.at("frequency_hz").get<double>(), term.value("amplitude", 1.0)});
    }
    spec.node_terms.push_back(std::move(terms));
  }
  return spec;
}

json ground_truth_json(const SynthSpec& spec, const SynthOutput& out) {
  json components = json::array();
  for (const auto& c : out.truth.components) {
    json partition = json::array();
    for (const auto& group : c.partition) {
      json ids = json::array();
      for (int n : group) ids.push_back(n + 1);
      partition.push_back(ids);
    }
    components.push_back({{"frequency_hz", c.frequency_hz},
                          {"amplitudes", std::vector<double>(c.amplitudes.begin(), c.amplitudes.end())},
                          {"partition", partition}});
  }
  return {{"sample_rate_hz", spec.sample_rate_hz},
          {"duration_s", spec.duration_s},
          {"n_nodes", out.signal.n_nodes()},
          {"n_samples", out.signal.n_samples()},
          {"snr_db", spec.snr_db ? json(*spec.snr_db) : json(nullptr)},
          {"seed", spec.seed},
          {"node_numbering", "1-based"},
          {"components", components}};
}

int cmd_synth(const SynthArgs& args, std::ostream& out) {
  SynthSpec spec;
  if (!args.spec_path.empty()) {
    try {
      spec = synth_spec_from_json(read_json(args.spec_path));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ParseError, args.spec_path + ": " + e.what());
    }
  } else if (args.preset == "paper") {
    spec = paper_preset();
  } else {
    throw Error(ErrorKind::BadParameter, "unknown preset '" + args.preset + "'");
  }
  if (args.snr_db) spec.snr_db = args.snr_db;
  if (args.seed) spec.seed = *args.seed;

  const SynthOutput result = generate(spec);
  const fs::path signal_path = args.out;
  fs::path dir = signal_path.parent_path();
  if (dir.empty()) dir = ".";
  std::error_code ec;
  fs::create_directories(dir, ec);
  write_signal_csv(signal_path, result.signal.samples);
  write_file_atomic(dir / "ground_truth.json", ground_truth_json(spec, result).dump(2) + "\n");
  out << "wrote " << signal_path.string() << " (" << result.signal.n_nodes() << " x "
      << result.signal.n_samples() << ") and " << (dir / "ground_truth.json").string() << "\n";
  return exit_ok;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TVGMD_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int cmd_decompose(DecomposeArgs args, std::ostream& out) {
  args.config.omega_init = parse_omega_init(args.omega_init);
  args.config.mirror_extend = !args.no_mirror;
  args.config.threads = resolve_threads(args.threads);
  if (args.mvmd) args.config.beta = 0.0;

  const TimeVaryingGraphSignal signal = read_signal_csv(args.input, args.fs, args.header);
  const std::string checksum = sha256_file(args.input);

  const auto start = std::chrono::steady_clock::now();
  const DecompositionResult result =
      args.mvmd ? decompose_mvmd(signal, args.config) : decompose(signal, args.config);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  const RunManifest manifest = make_manifest(result, args.config, args.fs, checksum, args.mvmd, ms);
  write_result(args.out, result, manifest);

  out << (args.mvmd ? "mvmd-baseline" : "tvgmd") << ": " << result.iterations << " iterations, "
      << (result.converged ? "converged" : "NOT converged") << "\n";
  for (std::size_t k = 0; k < result.modes.size(); ++k) {
    out << "  mode " << k + 1 << ": " << std::setprecision(6) << result.modes[k].center_freq_hz
        << " Hz\n";
  }
  return result.converged ? exit_ok : exit_not_converged;
}

struct Edge {
  double weight;
  Eigen::Index m;
  Eigen::Index n;
};

std::vector<Edge> sorted_edges(const Eigen::VectorXd& w, Eigen::Index n_nodes) {
  std::vector<Edge> edges;
  EdgeIndexing(n_nodes).for_each(
      [&](Eigen::Index e, Eigen::Index m, Eigen::Index n) { edges.push_back({w[e], m, n}); });
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge& a, const Edge& b) { return a.weight > b.weight; });
  return edges;
}

int cmd_inspect(const InspectArgs& args, std::ostream& out) {
  const fs::path dir = args.dir;
  const fs::path summary_path = dir / "summary.json";
  if (!fs::exists(summary_path)) {
    throw Error(ErrorKind::IoError, "no summary.json in " + dir.string());
  }
  const json summary = read_json(summary_path);
  DecompositionConfig config;
  std::vector<double> omegas_hz;
  double fs_hz = 0.0;
  try {
    config = config_from_json(summary.at("config"));
    omegas_hz = summary.at("omegas_hz").get<std::vector<double>>();
    fs_hz = summary.at("sample_rate_hz").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, summary_path.string() + ": " + e.what());
  }

  out << "method " << summary.value("method", "?") << ", " << summary.value("iterations", 0)
      << " iterations, converged " << (summary.value("converged", false) ? "yes" : "no") << "\n";
  out << "mode  center_hz   concentration\n";

  for (std::size_t k = 0; k < omegas_hz.size(); ++k) {
    const TimeVaryingGraphSignal mode = read_signal_csv(mode_csv_path(dir, k + 1), fs_hz);
    std::vector<HalfSpectrum> row;
    for (Eigen::Index n = 0; n < mode.n_nodes(); ++n) {
      row.push_back(to_half_spectrum(mode.samples.row(n).transpose(), config.mirror_extend));
    }
    const double concentration = spectral_concentration(row, omegas_hz[k] / fs_hz);
    out << std::setw(4) << k + 1 << "  " << std::setw(10) << std::fixed << std::setprecision(4)
        << omegas_hz[k] << "  " << std::setw(8) << std::setprecision(4) << concentration << "\n"
        << std::defaultfloat;

    if (fs::exists(adjacency_path(dir, k + 1))) {
      const Eigen::VectorXd w = read_adjacency_json(adjacency_path(dir, k + 1));
      const auto edges = sorted_edges(w, mode.n_nodes());
      const std::size_t shown = args.edges ? edges.size() : std::min<std::size_t>(5, edges.size());
      out << "      " << (args.edges ? "edges" : "top edges") << ":";
      for (std::size_t i = 0; i < shown; ++i) {
        out << (i % 5 == 0 && i > 0 ? "\n             " : " ") << edges[i].m + 1 << "-"
            << edges[i].n + 1 << " (" << std::setprecision(4) << edges[i].weight << ")";
      }
      out << "\n";
    }

    if (args.plot_data) {
      std::string csv = "frequency_hz";
      for (Eigen::Index n = 0; n < mode.n_nodes(); ++n) csv += ",node_" + std::to_string(n + 1);
      csv += '\n';
      const HalfSpectrum& first = row.front();
      for (Eigen::Index f = 0; f < first.size(); ++f) {
        csv += detail::format_number(first.frequency(f) * fs_hz);
        for (const auto& spec : row) csv += "," + detail::format_number(std::abs(spec.bins[f]));
        csv += '\n';
      }
      const fs::path plot_path = dir / ("spectrum_" + std::to_string(k + 1) + ".csv");
      write_file_atomic(plot_path, csv);
      out << "      spectrum -> " << plot_path.string() << "\n";
    }
  }
  return exit_ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-varying graph mode decomposition"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic time-varying graph signal");
  auto* preset_opt = synth_cmd->add_option("--preset", synth.preset, "Built-in signal (paper)")
                         ->check(CLI::IsMember({"paper"}));
  auto* spec_opt =
      synth_cmd->add_option("--spec", synth.spec_path, "Custom SynthSpec JSON")->check(CLI::ExistingFile);
  preset_opt->excludes(spec_opt);
  synth_cmd->add_option("--snr", synth.snr_db, "Per-node SNR in dB (noise off when absent)");
  synth_cmd->add_option("--seed", synth.seed, "Noise seed (default 0)");
  synth_cmd->add_option("--out", synth.out, "Output CSV path")->required();

  DecomposeArgs dec;
  auto* dec_cmd = app.add_subcommand("decompose", "Decompose a signal CSV into graph modes");
  dec_cmd->add_option("--input", dec.input, "Signal CSV, one row per node")
      ->required()
      ->check(CLI::ExistingFile);
  dec_cmd->add_option("--fs", dec.fs, "Sample rate in Hz")->required();
  dec_cmd->add_option("--out", dec.out, "Output directory")->required();
  dec_cmd->add_option("--k", dec.config.k, "Number of modes")->capture_default_str();
  dec_cmd->add_option("--alpha", dec.config.alpha, "Bandwidth penalty")->capture_default_str();
  dec_cmd->add_option("--beta", dec.config.beta, "Graph smoothness weight")->capture_default_str();
  dec_cmd->add_option("--gamma", dec.config.gamma, "Edge weight penalty")->capture_default_str();
  dec_cmd->add_option("--tau", dec.config.tau, "Dual ascent step")->capture_default_str();
  dec_cmd->add_option("--epsilon", dec.config.epsilon, "Convergence tolerance")->capture_default_str();
  dec_cmd->add_option("--max-iter", dec.config.max_iter, "Outer iteration cap")->capture_default_str();
  dec_cmd->add_option("--graph-max-iter", dec.config.graph_max_iter, "Graph learner iteration cap")
      ->capture_default_str();
  dec_cmd->add_option("--graph-epsilon", dec.config.graph_epsilon, "Graph learner tolerance")
      ->capture_default_str();
  dec_cmd->add_option("--omega-init", dec.omega_init, "zeros|uniform|peaks")->capture_default_str();
  dec_cmd->add_flag("--mvmd", dec.mvmd, "Multivariate VMD baseline (beta = 0, no graphs)");
  dec_cmd->add_flag("--no-mirror", dec.no_mirror, "Disable mirror extension at the boundaries");
  dec_cmd->add_flag("--normalize-distances", dec.config.normalize_distances,
                    "Divide pairwise distances by their mean before graph learning");
  dec_cmd->add_flag("--header", dec.header, "Input has a header line and a label column");
  dec_cmd->add_option("--threads", dec.threads,
                      "Worker threads (default: TVGMD_THREADS, else all cores)");

  InspectArgs insp;
  auto* insp_cmd = app.add_subcommand("inspect", "Summarize a finished run directory");
  insp_cmd->add_option("dir", insp.dir, "Run directory")->required();
  insp_cmd->add_flag("--edges", insp.edges, "List every edge, not just the top 5");
  insp_cmd->add_flag("--plot-data", insp.plot_data, "Write spectrum_k.csv magnitude tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*synth_cmd) {
      if (synth.preset.empty() && synth.spec_path.empty()) {
        err << "synth: one of --preset or --spec is required\n" << synth_cmd->help();
        return exit_usage;
      }
      return cmd_synth(synth, out);
    }
    if (*dec_cmd) return cmd_decompose(dec, out);
    return cmd_inspect(insp, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_error;
  }
}

}  // namespace tvgmd::cli
