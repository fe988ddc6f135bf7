// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--expect-fail 3,...]
//
// Exit status is 0 when the failing set equals the expected-fail set exactly.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "oracles.hpp"
#include "tvgmd/tvgmd.hpp"

using namespace tvgmd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

// 0-based node groups from the preset
const std::vector<int> group_a{0, 2, 4, 6, 7};
const std::vector<int> out_of_phase_group{3, 4, 6, 7};
constexpr int out_of_phase_node = 1;
const double truth_hz[] = {2, 24, 48, 128};

DecompositionConfig preset_config() {
  DecompositionConfig c;
  c.k = 4;
  c.alpha = 200;
  c.beta = 0.1;
  c.gamma = 1;
  c.tau = 0;
  return c;
}

bool in(const std::vector<int>& g, int n) { return std::find(g.begin(), g.end(), n) != g.end(); }

double partition_ratio(const Eigen::MatrixXd& w) {
  double internal = 0, cross = 0;
  int n_internal = 0, n_cross = 0;
  for (int m = 0; m < 8; ++m) {
    for (int n = m + 1; n < 8; ++n) {
      if (in(group_a, m) == in(group_a, n)) {
        internal += w(m, n);
        ++n_internal;
      } else {
        cross += w(m, n);
        ++n_cross;
      }
    }
  }
  return (internal / n_internal) / (cross / n_cross);
}

double out_of_phase_ratio(const Eigen::MatrixXd& w) {
  double internal = 0, to_node = 0;
  int count = 0;
  for (int m : out_of_phase_group) {
    to_node += w(out_of_phase_node, m);
    for (int n : out_of_phase_group) {
      if (m < n) {
        internal += w(m, n);
        ++count;
      }
    }
  }
  return to_node / (internal / count);
}

double max_freq_error(const DecompositionResult& r) {
  double worst = 0;
  for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(r.modes[k].center_freq_hz - truth_hz[k]));
  return worst;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

struct Suite {
  std::vector<bool> converged_runs;

  DecompositionResult run(const TimeVaryingGraphSignal& x, const DecompositionConfig& c) {
    auto r = decompose(x, c);
    converged_runs.push_back(r.converged && r.iterations < c.max_iter);
    return r;
  }

  Outcome frequencies(const DecompositionResult& r, double seconds) {
    const double err = max_freq_error(r);
    std::string detail = "f_hz =";
    for (const auto& m : r.modes) detail += " " + fmt(m.center_freq_hz);
    detail += ", max error " + fmt(err) + " Hz, " + fmt(seconds) + " s";
    return {err <= 0.5 && seconds < 10.0, detail};
  }

  Outcome connectivity(const DecompositionResult& r) {
    const double ratio = partition_ratio(densify(r.modes[0].edge_weights, 8).adjacency);
    const double node = out_of_phase_ratio(densify(r.modes[1].edge_weights, 8).adjacency);
    return {ratio > 3.0 && node < 1.0 / 3.0,
            "2 Hz internal/cross " + fmt(ratio) + " (> 3), 24 Hz node 2 share " + fmt(node) + " (< 1/3)"};
  }

  Outcome noise() {
    int freq_ok = 0, graph_ok = 0;
    std::string worst;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto spec = paper_preset();
      spec.snr_db = 6;
      spec.seed = seed;
      const auto r = run(generate(spec).signal, preset_config());
      const double err = max_freq_error(r);
      freq_ok += err <= 1.0;
      graph_ok += partition_ratio(densify(r.modes[0].edge_weights, 8).adjacency) > 2.0;
      worst += " " + fmt(r.modes[3].center_freq_hz);
    }
    return {freq_ok >= 9 && graph_ok >= 8, "freq within 1 Hz " + std::to_string(freq_ok) +
                                               "/10 (>= 9), partition 2x " + std::to_string(graph_ok) +
                                               "/10 (>= 8); top mode Hz:" + worst};
  }
};

Outcome learner_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (Eigen::Index n : {3, 4}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd z = oracles::random_vector(rng, n * (n - 1) / 2, 0.0, 3.0);
      const double beta = 0.1 + 0.9 * u(rng), gamma = 0.5 + 0.5 * u(rng);
      const auto w = learn_graph(z, beta, gamma, Eigen::VectorXd::Zero(z.size()), 200000, 1e-12).w;
      worst = std::max(worst, (w - oracles::pgd_learner(z, beta, gamma, n)).lpNorm<Eigen::Infinity>());
    }
  }
  double worst2 = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd z(1);
    z << 5.0 * u(rng);
    const double beta = 0.1 + u(rng), gamma = 0.5 + u(rng);
    const auto w = learn_graph(z, beta, gamma, Eigen::VectorXd::Zero(1), 200000, 1e-12).w;
    worst2 = std::max(worst2, std::abs(w[0] - oracles::two_node_weight(z[0], beta, gamma)));
  }
  return {worst <= 1e-4 && worst2 <= 1e-8,
          "N=3,4 max deviation " + fmt(worst) + " (<= 1e-4), N=2 " + fmt(worst2) + " (<= 1e-8)"};
}

Outcome subproblems() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  constexpr int instances = 100;
  double bin = 0, solve = 0, forms = 0, adjoint = 0;
  for (int trial = 0; trial < instances; ++trial) {
    const Eigen::Index t_ext = 4 + trial % 60;
    auto rand_spec = [&] {
      HalfSpectrum s;
      s.t_ext = t_ext;
      s.bins.resize(half_spectrum_size(t_ext));
      for (auto& v : s.bins) v = {u(rng), u(rng)};
      return s;
    };
    const auto x = rand_spec(), others = rand_spec(), lambda = rand_spec();
    const double omega = 0.25 * (u(rng) + 1.0), alpha = std::pow(10.0, 3.0 * (u(rng) + 1.0));
    const auto g = update_mode_spectrum(x, others, lambda, omega, alpha);
    for (Eigen::Index f = 0; f < x.size(); ++f) {
      const double off = x.frequency(f) - omega;
      const auto ref = oracles::per_bin_minimizer(x.bins[f] - others.bins[f] + 0.5 * lambda.bins[f],
                                                  2.0 * alpha * off * off);
      bin = std::max(bin, std::abs(g.bins[f] - ref));
    }

    const Eigen::Index n = 2 + trial % 9;
    const Eigen::VectorXd w = oracles::random_vector(rng, n * (n - 1) / 2, 0.0, 1.0);
    const auto graph = densify(w, n);
    const Eigen::MatrixXd f = oracles::random_matrix(rng, n, 16);
    const double beta = std::pow(10.0, 2.0 * u(rng));
    const Eigen::MatrixXd solved = geodesic_update(f, graph, beta);
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) + beta * graph.laplacian;
    solve = std::max(solve, (system * solved - f).norm());

    const double trace = smoothness(f, graph);
    forms = std::max({forms, std::abs(trace - oracles::pairwise_smoothness(f, graph.adjacency)),
                      std::abs(trace - w.dot(pairwise_distances(f)))});

    const Eigen::VectorXd wr = oracles::random_vector(rng, n * (n - 1) / 2);
    const Eigen::VectorXd d = oracles::random_vector(rng, n);
    adjoint = std::max(adjoint, std::abs(apply_q(wr, n).dot(d) - wr.dot(apply_q_transpose(d))));
  }
  return {bin <= 1e-9 && solve <= 1e-9 && forms <= 1e-9 && adjoint <= 1e-12,
          std::to_string(instances) + " instances each: per-bin " + fmt(bin) + ", solve residual " +
              fmt(solve) + ", two forms " + fmt(forms) + ", adjoint " + fmt(adjoint)};
}

Outcome reconstruction(Suite& suite) {
  SynthSpec spec;
  spec.node_terms = {{{5, 1}, {40, 1}}, {{5, 0.5}, {40, 1}}, {{5, 1}, {40, -0.7}}, {{5, 2}, {40, 0.3}}};
  const auto x = generate(spec).signal;
  DecompositionConfig c;
  c.k = 2;
  c.alpha = 200;
  c.beta = 0;
  c.tau = 1;
  const auto r = suite.run(x, c);
  const double rel = r.residual.norm() / x.samples.norm();
  return {r.converged && rel <= 1e-2, "relative error " + fmt(rel) + " (<= 1e-2) after " +
                                          std::to_string(r.iterations) + " iterations"};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tvgmd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "tvgmd_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  bool ok = true;
  std::string detail;
  for (const auto* name : {"a.csv", "b.csv"}) {
    ok &= cli({"synth", "--preset", "paper", "--snr", "6", "--seed", "11", "--out", p(name)}) == 0;
  }
  const bool synth_same = read_file(p("a.csv")) == read_file(p("b.csv"));
  detail += std::string("synth repeat ") + (synth_same ? "identical" : "differs");

  const std::vector<std::pair<std::string, std::string>> runs{{"t1", "1"}, {"t4", "4"}, {"t1b", "1"}};
  for (const auto& [out, threads] : runs) {
    ok &= cli({"decompose", "--input", p("a.csv"), "--fs", "1024", "--k", "4", "--alpha", "200", "--beta",
               "0.1", "--gamma", "1", "--tau", "0", "--threads", threads, "--out", p(out)}) == 0;
  }
  int files = 0, mismatched = 0;
  for (const auto& entry : fs::directory_iterator(dir / "t1")) {
    const auto name = entry.path().filename();
    if (name == "timing.json") continue;
    ++files;
    const auto ref = read_file(entry.path());
    for (const auto* other : {"t4", "t1b"}) mismatched += !fs::exists(dir / other / name) || read_file(dir / other / name) != ref;
  }
  detail += ", " + std::to_string(files) + " output files, " + std::to_string(mismatched) +
            " mismatches across threads 1/4/1";
  fs::remove_all(dir);
  return {ok && synth_same && files == 9 && mismatched == 0, detail};
}

std::set<int> parse_expected(int argc, char** argv) {
  std::set<int> expected;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--expect-fail" && i + 1 < argc) {
      std::istringstream list(argv[++i]);
      std::string item;
      while (std::getline(list, item, ',')) expected.insert(std::stoi(item));
    } else {
      throw std::invalid_argument(std::string("unknown argument ") + argv[i]);
    }
  }
  return expected;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected;
  try {
    expected = parse_expected(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\nusage: acceptance [--expect-fail 3,...]\n";
    return 2;
  }

  Suite suite;
  std::vector<Outcome> outcomes;
  try {
    const auto clean = generate(paper_preset()).signal;
    const auto start = std::chrono::steady_clock::now();
    const auto r = suite.run(clean, preset_config());
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    outcomes.push_back(suite.frequencies(r, seconds));
    outcomes.push_back(suite.connectivity(r));
    outcomes.push_back(suite.noise());
    outcomes.push_back(learner_oracle());
    outcomes.push_back(subproblems());
    outcomes.push_back(reconstruction(suite));
    const auto stopped = std::count(suite.converged_runs.begin(), suite.converged_runs.end(), true);
    outcomes.push_back({stopped == static_cast<long>(suite.converged_runs.size()),
                        std::to_string(stopped) + "/" + std::to_string(suite.converged_runs.size()) +
                            " decompositions stopped before 500 iterations"});
    outcomes.push_back(determinism());
  } catch (const std::exception& e) {
    std::cerr << "acceptance aborted: " << e.what() << "\n";
    return 1;
  }

  const char* names[] = {"frequency recovery", "connectivity recovery", "noise robustness",
                         "graph learner oracle", "subproblem optimality", "reconstruction",
                         "convergence", "determinism"};
  std::set<int> failed;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!outcomes[i].pass) failed.insert(id);
    std::cout << (outcomes[i].pass ? "PASS" : "FAIL") << " " << id << " " << names[i] << ": "
              << outcomes[i].detail << (expected.count(id) ? " [expected failure]" : "") << "\n";
  }
  if (failed != expected) {
    std::cout << "failing set differs from the expected-fail list\n";
    return 1;
  }
  return 0;
}
