// MVMD baseline on a CSV file: tvgmd_csv_demo signal.csv fs [k]
#include <iostream>

#include "tvgmd/tvgmd.hpp"

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: " << argv[0] << " signal.csv fs [k]\n";
    return 2;
  }
  try {
    const auto signal = tvgmd::read_signal_csv(argv[1], std::stod(argv[2]));
    tvgmd::DecompositionConfig config;
    config.k = argc > 3 ? std::stoi(argv[3]) : 3;
    const auto result = tvgmd::decompose_mvmd(signal, config);
    for (const auto& mode : result.modes) std::cout << mode.center_freq_hz << " Hz\n";
    std::cout << "residual " << result.residual.norm() << "\n";
  } catch (const tvgmd::Error& e) {
    std::cerr << to_string(e.kind()) << ": " << e.what() << "\n";
    return 1;
  }
}
