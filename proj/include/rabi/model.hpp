#pragma once

#include <span>
#include <string>
#include <vector>

namespace rabi {

struct RabiParams {
  double omega = 1.0;
  double E = 1.0;
  double g = 1.0;
  double hbar = 1.0;

  // Throws DomainError unless every field is finite and strictly positive.
  void validate() const;
};

enum class Branch { plus, minus };

// N-periodic real sequence v(k) with its real Fourier data:
// v(k) = alpha0 + sum_m alpha(m) cos(2 pi m k/N) + sum_m alpha_tilde(m) sin(2 pi m k/N).
class PeriodicPotential {
 public:
  PeriodicPotential() = default;

  // values[j] holds v(j + 1); v(k) for other integers follows by periodicity.
  static PeriodicPotential from_values(std::vector<double> values);

  int period() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  double operator()(long k) const;

  double alpha0() const { return alpha0_; }
  // 1 <= m <= N/2; zero outside that range.
  double alpha(int m) const;
  // 1 <= m <= (N-1)/2; zero outside that range.
  double alpha_tilde(int m) const;
  int max_cos_mode() const { return period() / 2; }
  int max_sin_mode() const { return (period() - 1) / 2; }

  double reconstruct(long k) const;
  double rho_N() const { return rho_N_; }
  // rho_N < 1/2 for N = 2, rho_N < 1/(pi sqrt N) for N >= 3.
  bool smallness_holds() const;
  double smallness_limit() const;

  bool is_zero() const;
  PeriodicPotential shifted(double c) const;

 private:
  std::vector<double> values_;
  std::vector<double> alpha_;        // alpha_[m - 1]
  std::vector<double> alpha_tilde_;  // alpha_tilde_[m - 1]
  double alpha0_ = 0.0;
  double rho_N_ = 0.0;
};

PeriodicPotential fourier_decompose(std::span<const double> values);

// a(k) = a1 k^gamma + a1prime k^(gamma - 1) for k > 0 and a(k) = 0 for k <= 0.
struct OffDiagonalProfile {
  double a1 = 1.0;
  double gamma = 0.5;
  double a1prime = 0.0;

  void validate() const;
  double operator()(double k) const;
  // a(x + h) - a(x) without cancellation when h << x.
  double difference(double x, double h) const;
  double delta(double k) const { return difference(k, 1.0); }
  double delta2(double k) const { return difference(k + 1.0, 1.0) - difference(k, 1.0); }
  bool is_zero() const { return a1 == 0.0 && a1prime == 0.0; }
};

// Sampled constants with c k^g <= a(k) <= C k^g, |da(k)| <= C1 k^(g-1),
// |d2a(k)| <= C2 k^(g-2) for k >= k0.
struct HypothesisConstants {
  double c = 0.0;
  double C = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  long k0 = 1;
  long sampled_to = 0;
  bool holds = false;
};

HypothesisConstants certify_profile(const OffDiagonalProfile& a, long K = 20000);

enum class Mode { H0, H12 };

class ModelSpec {
 public:
  ModelSpec() = default;
  ModelSpec(Mode mode, OffDiagonalProfile offdiag, PeriodicPotential potential);

  // v(k) = (-1)^k rho, a(k) = a1 sqrt(k).
  static ModelSpec h0(double a1, double rho);
  static ModelSpec h12(OffDiagonalProfile offdiag, PeriodicPotential potential);

  Mode mode() const { return mode_; }
  const OffDiagonalProfile& offdiag() const { return offdiag_; }
  const PeriodicPotential& potential() const { return potential_; }
  double gamma() const { return offdiag_.gamma; }
  int period() const { return potential_.period(); }

  double d(long k) const { return static_cast<double>(k) + potential_(k); }
  double a(long k) const { return offdiag_(static_cast<double>(k)); }
  double v(long k) const { return potential_(k); }

  // H0 amplitude rho = alpha(1).
  double rho() const { return potential_.alpha(1); }
  double alpha0() const { return potential_.alpha0(); }
  bool smallness_holds() const;

  // Same operator minus alpha0 I; spectra differ by the constant alpha0.
  ModelSpec centered() const;

 private:
  Mode mode_ = Mode::H0;
  OffDiagonalProfile offdiag_{};
  PeriodicPotential potential_ = PeriodicPotential::from_values({0.0, 0.0});
};

// lambda(H) = shift + scale * lambda(J).
struct SpectralMap {
  double shift = 0.0;
  double scale = 1.0;
  double operator()(double lambda_J) const { return shift + scale * lambda_J; }
  double inverse(double lambda_H) const { return (lambda_H - shift) / scale; }
};

struct RabiJacobi {
  ModelSpec spec;
  SpectralMap map;
  Branch branch = Branch::plus;
};

RabiJacobi rabi_to_jacobi(const RabiParams& params, Branch branch);

struct EntryPair {
  long k;
  double d;
  double a;
};

// (d(k), a(k)) for k in [k_lo, k_hi] with k_lo >= 1. ModelSpec::a(0) is 0.
std::vector<EntryPair> entries(const ModelSpec& spec, long k_lo, long k_hi);

std::string to_string(Mode mode);

}  // namespace rabi
