// Fixes the two oscillatory constants. The stationary phase constant comes
// from calibration_symbols() on a dense mu grid; the van der Corput constant
// from random draws with seeds disjoint from the acceptance draws (1..500).
#include <cmath>
#include <cstdio>
#include <string>

#include "rabi/oscillatory.hpp"

int main(int argc, char** argv) {
  using namespace rabi;
  const double safety = argc > 1 ? std::stod(argv[1]) : 1.5;
  constexpr int kMuPoints = 241;

  double c0 = 0.0;
  std::string c0_at;
  for (const auto& b : calibration_symbols()) {
    const double norm = b.c2_norm();
    for (double eta0 : {0.0, 0.7, 2.1}) {
      for (int j = 0; j < kMuPoints; ++j) {
        const double mu = 10.0 * std::pow(1e3, static_cast<double>(j) / (kMuPoints - 1));
        const auto I = integral_I(b, mu, eta0);
        const auto sp = stationary_phase(b, mu, eta0, 1.0);
        const double ratio = mu * std::abs(I - sp.main_term) / norm;
        if (ratio > c0) {
          c0 = ratio;
          c0_at = b.name + " eta0=" + std::to_string(eta0) + " mu=" + std::to_string(mu);
        }
      }
    }
  }

  double cd = 0.0;
  std::uint64_t cd_seed = 0;
  for (std::uint64_t seed = 1000001; seed <= 1003000; ++seed) {
    const auto ci = random_corput_integrand(seed);
    const double ratio = std::abs(integral_J(ci)) / corput_bound(ci, 1.0);
    if (ratio > cd) {
      cd = ratio;
      cd_seed = seed;
    }
  }

  std::printf("stationary phase: max ratio %.6f at %s; C0 = %.4g\n", c0, c0_at.c_str(), safety * c0);
  std::printf("van der Corput: max ratio %.6f at seed %llu; C = %.4g\n", cd,
              static_cast<unsigned long long>(cd_seed), safety * cd);
  return 0;
}
