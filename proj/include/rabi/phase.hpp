#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rabi/model.hpp"

namespace rabi {

// {2 pi m / N : m = 1..N-1}
std::vector<double> omega_set(int N);
bool in_omega_set(double omega, int N, double tol = 1e-12);

// Distance from x to 2 pi Z.
double dist_2pi(double x);

struct PhaseState {
  std::vector<double> omegas;
  std::vector<double> times;
  std::complex<double> z;
  double alpha = 0.0;  // arg z in [0, 2 pi); 0 when z = 0
  // Populated for nu >= 2 from the state with the last pair removed.
  std::complex<double> zhat;
  double alphahat = 0.0;

  std::size_t nu() const { return omegas.size(); }
};

// z(omega; t) = (e^{-i omega} - 1) e^{-i t}, extended by
// z(w; t) = z(w'; t') e^{-i omega_nu} + z(omega_nu; t_nu).
PhaseState z_state(std::span<const double> omegas, std::span<const double> times, int N);

// sqrt(4 |z| sin^2(t/2) + (1 - |z|)^2)
double h_frak(double t, std::complex<double> z);

struct BoundsReport {
  // |z| - 2 sin(omega_nu/2) h(t_nu + alphahat, zhat)
  double modulus_identity_error = 0.0;
  // |z| - (2 sin(omega_nu/2)/pi) |t_nu + alphahat|_{2pi}; >= 0 when the bound holds.
  double lower_bound_margin = 0.0;
  // 6/|z| - |d e^{i alpha} / d t_nu|; >= 0 when the bound holds.
  double derivative_margin = 0.0;
  double derivative = 0.0;
  double richardson_gap = 0.0;
  bool derivative_skipped = false;
  std::string skip_reason;
  bool pass = false;
};

// Needs nu >= 2. The derivative uses central differences with step h and h/2,
// combined by Richardson extrapolation.
BoundsReport z_bounds_check(const PhaseState& state, int N, double h = 1e-6);

// Random state with nu omegas from Omega*_N and times in [-10, 10].
PhaseState random_phase_state(std::uint64_t seed, int N, std::size_t nu);

struct PhaseOptions {
  // Enables the nu >= 2 psi_{n,2} construction, which is excluded from acceptance.
  bool proof_exploration = false;
};

// Phase functions of a model at index n. Functions on the circle take the angle.
class PhaseField {
 public:
  PhaseField(const ModelSpec& spec, long n, PhaseOptions options = {});

  long n() const { return n_; }
  double gamma() const { return gamma_; }
  double a() const { return a_; }
  double delta_a() const { return da_; }
  double phi_c2_norm() const { return phi_c2_; }

  // phi_n(xi) = 2 da (1 - da cos xi) sin xi and its first two derivatives.
  double phi(double xi) const;
  double phi_prime(double xi) const;
  double phi_second(double xi) const;
  double eta_of_xi(double xi) const { return xi - phi(xi); }
  // Inverse of eta_of_xi; safeguarded Newton.
  double xi_of_eta(double eta) const;

  // -4 a sin(omega/2) cos(xi - t - omega/2)
  double psi1(double omega, double t, double xi) const;
  // 2 a Im(z(omega; t) e^{i xi})
  double psi1_im(double omega, double t, double xi) const;
  // Built through the recursion over the pairs (omega_j, t_j).
  double psi1_vec(std::span<const double> omegas, std::span<const double> times, double xi) const;

  // -a da sin 2 xi
  double psi2_base(double xi) const;
  // 2 a da sin(omega) cos(2 xi - omega)
  double psi_I(double omega, double xi) const;
  // psi2_base(xi - omega) - psi2_base(xi)
  double psi_I_direct(double omega, double xi) const;
  double psi_II(double omega, double eta) const;
  double r_omega(double omega, double eta) const;
  // (psi_II + psi_I o theta_n) o tau_t
  double psi2(double omega, double t, double xi) const;

  // Requires proof_exploration.
  double psi2_vec(std::span<const double> omegas, std::span<const double> times, double xi) const;
  double phi1(double omega, double t, double xi) const;
  double xi_of_eta_shifted(double omega, double t, double eta) const;

 private:
  long n_;
  double gamma_;
  double a_;
  double da_;
  double phi_sup_;
  double phi_c2_;
  PhaseOptions options_;
};

PhaseField build_phase_field(const ModelSpec& spec, long n, PhaseOptions options = {});

struct Psi1Report {
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

Psi1Report psi1_recursion_check(std::span<const double> omegas, std::span<const double> times,
                                const ModelSpec& spec, long n, int grid = 512);

// sup over an angle grid of |r_n^omega| and max over the two stationary
// points of |psi_II^omega|.
struct DecaySample {
  double r_sup = 0.0;
  double psi_II_stationary = 0.0;
};

DecaySample lemma82_sample(const PhaseField& field, double omega, int grid = 4096);

}  // namespace rabi
