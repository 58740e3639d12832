#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rabi/jet.hpp"
#include "rabi/model.hpp"

namespace rabi {

using cplx = std::complex<double>;

// b on the unit circle as a function of the angle, b(e^{i eta}), with
// derivatives in eta up to order two.
struct PeriodicSymbol {
  std::string name;
  std::function<Jet(const Jet&)> fn;

  cplx operator()(double eta) const { return fn(Jet::variable(eta)).v; }
  Jet jet(double eta) const { return fn(Jet::variable(eta)); }
  // max over j <= 2 of sup |d^j b|, sampled on a uniform grid.
  double c2_norm(int grid = 4096) const;
  // |b(0) - b(2 pi)|
  double periodicity_defect() const;
  // b rotated: eta -> b(eta - c).
  PeriodicSymbol rotated(double c) const;
};

struct QuadratureReport {
  std::size_t evaluations = 0;
  double last_change = 0.0;
};

// (1/2pi) int_0^{2pi} e^{i mu cos(eta - eta0)} b(e^{i eta}) d eta by the
// trapezoidal rule, doubling until the change is below 1e-12 (1 + |I|).
cplx integral_I(const PeriodicSymbol& b, double mu, double eta0,
                QuadratureReport* report = nullptr);

// Calibrated on calibration_symbols() over a dense mu grid; see README.
inline constexpr double kStationaryPhaseC0 = 0.175;

struct StationaryPhase {
  cplx main_term;
  double remainder_bound = 0.0;
};

StationaryPhase stationary_phase(const PeriodicSymbol& b, double mu, double eta0,
                                 double C0 = kStationaryPhaseC0);

// Twenty smooth symbols used for the stationary phase regression check.
std::vector<PeriodicSymbol> stationary_phase_family();
// Disjoint family used once to fix kStationaryPhaseC0.
std::vector<PeriodicSymbol> calibration_symbols();

// Oscillatory approximation of g_n(k) for N = 2 and |k - n| <= n^gamma.
double g_frak(const ModelSpec& spec, long n, long k);

// Stationary phase value of g_n(n) for general N.
double g_frak_generalN(const ModelSpec& spec, long n);

// Integrand data for int_{t1}^{t2} e^{i mu sqrt(4 sin^2(t/2) + zeta^2)}
// (4 sin^2(t/2) + zeta^2)^{-1/4} b(t) dt.
struct CorputIntegrand {
  // b and b' at t; dd is unused.
  std::function<Jet(const Jet&)> b;
  double t1 = 0.0;
  double t2 = 0.0;
  double zeta = 0.0;
  double mu = 1.0;

  void validate() const;
  // sup |b| + int |b'| over [t1, t2].
  double M_norm() const;
};

enum class Mesh { adaptive_graded, uniform_substituted };

struct AdaptiveReport {
  std::size_t panels = 0;
  std::size_t evaluations = 0;
  double error_estimate = 0.0;
};

cplx integral_J(const CorputIntegrand& ci, double tol = 1e-9, Mesh mesh = Mesh::adaptive_graded,
                AdaptiveReport* report = nullptr);

// Calibrated on draws from random_corput_integrand with seeds disjoint from
// the acceptance draws; see README.
inline constexpr double kCorputConstant = 5.72;

double corput_bound(const CorputIntegrand& ci, double C = kCorputConstant);

// Random draw: b from a small family of smooth functions, zeta in [0, 3],
// log-uniform mu in [10, 1e4], [t1, t2] inside [-pi, pi].
CorputIntegrand random_corput_integrand(std::uint64_t seed);

}  // namespace rabi
