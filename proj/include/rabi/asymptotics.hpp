#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rabi/eigensolve.hpp"
#include "rabi/model.hpp"

namespace rabi {

// Oscillatory correction r(n) for a general N-periodic potential. n may be
// non-integer; the mean alpha0 does not enter.
double r_of_n(const ModelSpec& spec, double n);

// (-1)^n rho cos(4 a1 sqrt(n) - pi/4) / sqrt(2 pi a1) n^(-1/4).
double r_of_n_h0(double a1, double rho, double n);

// Contribution of cos mode m (r_m) and of sin mode m (r~_m), per unit coefficient.
double r_cos_mode(const ModelSpec& spec, int m, double n);
double r_sin_mode(const ModelSpec& spec, int m, double n);

// sum_m (|alpha_m| + |alpha~_m|) / sqrt(2 pi a(n) sin(pi/N)).
double r_amplitude_bound(const ModelSpec& spec, double n);

// a(n-1)^2 - a(n)^2; exactly -a1^2 in H0 mode.
double two_term_offset(const ModelSpec& spec, long n);

enum class Source { E0, E2, Y0, GRWA };
Source parse_source(const std::string& s);
std::string to_string(Source s);

// g_n(n) of the centred model, by transform or by the oscillatory approximation.
struct GnProvider {
  std::string name;
  std::function<double(long)> fn;
};

struct PredictionRow {
  long n = 0;
  double leading = 0.0;
  double offset = 0.0;  // includes alpha0
  double oscillatory = 0.0;
  double prediction = 0.0;
  double remainder_exponent = 0.0;
  Source source = Source::E0;
  std::string gn_provider;
};

using PredictionTable = std::vector<PredictionRow>;

PredictionRow predict(const ModelSpec& spec, long n, Source source,
                      const GnProvider* provider = nullptr);
PredictionTable predict_table(const ModelSpec& spec, const std::vector<long>& ns, Source source,
                              const GnProvider* provider = nullptr);

struct FitReport {
  bool exact = false;
  double tolerance = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  // corr(lambda_n - two-term prediction, r(n)); NaN when r vanishes identically.
  double correlation = 0.0;
  std::size_t count = 0;
  double max_abs_residual = 0.0;
  std::vector<long> n;
  std::vector<double> residual;
};

// Rows whose n lies outside the slice are ignored.
FitReport residual_fit(const SpectrumSlice& lambdas, const PredictionTable& preds,
                       double exact_tol = 1e-9);

}  // namespace rabi
