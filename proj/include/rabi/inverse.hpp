#pragma once

#include <vector>

#include "rabi/model.hpp"

namespace rabi {

// Eigenvalues of one branch of the Rabi Hamiltonian in physical units.
struct BranchSpectrum {
  std::vector<long> n;
  std::vector<double> lambda;
};

struct RecoveryOptions {
  // a1 search interval is a1_hat * (1 +- relative_window).
  double relative_window = 0.05;
  int grid = 401;
  int golden_iterations = 80;
  // rho is reported as 0 when |rho_hat| <= noise_sigmas * standard error.
  double noise_sigmas = 3.0;
  // Largest tolerated relative change of the median spacing between the
  // lower and upper halves of the range.
  double trend_tol = 1e-3;
};

struct RecoveryResult {
  RabiParams params;  // E may be 0 and g may be 0; not validated
  double a1 = 0.0;
  double rho = 0.0;
  double rho_raw = 0.0;
  double rho_confidence = 0.0;
  bool rho_below_noise = false;
  double spacing_trend = 0.0;
  // RMS of both branches against the three-term formula at the estimate.
  double rms = 0.0;
  long n_min = 0;
  long n_max = 0;
  std::size_t count = 0;
};

// Uses the indices present in both branches. Needs n_max / n_min >= 4.
RecoveryResult recover_parameters(const BranchSpectrum& plus, const BranchSpectrum& minus,
                                  double hbar, const RecoveryOptions& options = {});

// Three-term eigenvalue of the given branch in physical units.
double three_term_physical(const RabiParams& params, Branch branch, long n);

}  // namespace rabi
