#include "rabi/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rabi/errors.hpp"

namespace rabi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
using cd = std::complex<double>;

cd z_single(double omega, double t) { return (std::polar(1.0, -omega) - 1.0) * std::polar(1.0, -t); }

double arg_0_2pi(cd z) {
  if (z == cd(0.0)) return 0.0;
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  return a;
}

double psi1_formula(double a, double omega, double t, double xi) {
  return -4.0 * a * std::sin(omega / 2.0) * std::cos(xi - t - omega / 2.0);
}

double psi1_recursive(double a, std::span<const double> omegas, std::span<const double> times,
                      double xi) {
  double total = 0.0;
  double x = xi;
  for (std::size_t j = omegas.size(); j-- > 0;) {
    total += psi1_formula(a, omegas[j], times[j], x);
    x -= omegas[j];
  }
  return total;
}

cd z_recursive(std::span<const double> omegas, std::span<const double> times) {
  cd z(0.0);
  for (std::size_t j = 0; j < omegas.size(); ++j) {
    z = z * std::polar(1.0, -omegas[j]) + z_single(omegas[j], times[j]);
  }
  return z;
}

}  // namespace

std::vector<double> omega_set(int N) {
  if (N < 2) throw DomainError("omega set needs N >= 2");
  std::vector<double> out;
  for (int m = 1; m < N; ++m) out.push_back(kTwoPi * m / N);
  return out;
}

bool in_omega_set(double omega, int N, double tol) {
  if (N < 2) return false;
  for (double w : omega_set(N)) {
    if (std::abs(w - omega) <= tol) return true;
  }
  return false;
}

double dist_2pi(double x) {
  const double r = x - kTwoPi * std::round(x / kTwoPi);
  return std::abs(r);
}

PhaseState z_state(std::span<const double> omegas, std::span<const double> times, int N) {
  if (omegas.empty() || omegas.size() != times.size()) {
    throw DomainError("z_state: omegas and times must be non-empty and of equal length");
  }
  for (double w : omegas) {
    if (!in_omega_set(w, N)) throw DomainError("z_state: omega outside Omega*");
  }
  for (double t : times) {
    if (!std::isfinite(t)) throw DomainError("z_state: times must be finite");
  }
  PhaseState s;
  s.omegas.assign(omegas.begin(), omegas.end());
  s.times.assign(times.begin(), times.end());
  s.z = z_recursive(omegas, times);
  s.alpha = arg_0_2pi(s.z);
  const std::size_t nu = omegas.size();
  if (nu >= 2) {
    const cd zp = z_recursive(omegas.first(nu - 1), times.first(nu - 1));
    const double w = omegas[nu - 1];
    s.zhat = zp / (2.0 * std::sin(w / 2.0));
    s.alphahat = arg_0_2pi(zp) - w / 2.0 - kPi / 2.0;
  }
  return s;
}

double h_frak(double t, std::complex<double> z) {
  const double m = std::abs(z);
  const double s = std::sin(t / 2.0);
  return std::sqrt(4.0 * m * s * s + (1.0 - m) * (1.0 - m));
}

BoundsReport z_bounds_check(const PhaseState& state, int N, double h) {
  const std::size_t nu = state.nu();
  if (nu < 2) throw DomainError("z_bounds_check needs nu >= 2");
  for (double w : state.omegas) {
    if (!in_omega_set(w, N)) throw DomainError("z_bounds_check: omega outside Omega*");
  }
  BoundsReport r;
  const double w = state.omegas[nu - 1];
  const double tn = state.times[nu - 1];
  const double s = std::sin(w / 2.0);
  const double mod = std::abs(state.z);
  r.modulus_identity_error = mod - 2.0 * s * h_frak(tn + state.alphahat, state.zhat);
  r.lower_bound_margin = mod - (2.0 * s / kPi) * dist_2pi(tn + state.alphahat);

  if (mod < 1e-4) {
    r.derivative_skipped = true;
    r.skip_reason = mod == 0.0 ? "z = 0; arg z undefined" : "|z| < 1e-4; finite differences unreliable";
  } else {
    const cd zp = z_recursive(std::span<const double>(state.omegas).first(nu - 1),
                              std::span<const double>(state.times).first(nu - 1));
    auto unit = [&](double t) {
      const cd z = zp * std::polar(1.0, -w) + z_single(w, t);
      return z / std::abs(z);
    };
    auto central = [&](double step) { return (unit(tn + step) - unit(tn - step)) / (2.0 * step); };
    const cd d1 = central(h);
    const cd d2 = central(h / 2.0);
    const cd rich = (4.0 * d2 - d1) / 3.0;
    r.derivative = std::abs(rich);
    r.richardson_gap = std::abs(rich - d2);
    r.derivative_margin = 6.0 / mod - r.derivative;
  }
  // Rounding slack on the equality cases of the inequalities.
  constexpr double kSlack = 1e-12;
  r.pass = std::abs(r.modulus_identity_error) <= kSlack && r.lower_bound_margin >= -kSlack &&
           (r.derivative_skipped || r.derivative_margin >= -kSlack);
  return r;
}

PhaseState random_phase_state(std::uint64_t seed, int N, std::size_t nu) {
  std::mt19937_64 rng(seed);
  const auto omegas = omega_set(N);
  std::vector<double> w(nu), t(nu);
  for (std::size_t j = 0; j < nu; ++j) {
    w[j] = omegas[rng() % omegas.size()];
    t[j] = -10.0 + 20.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
  return z_state(w, t, N);
}

PhaseField::PhaseField(const ModelSpec& spec, long n, PhaseOptions options)
    : n_(n), gamma_(spec.gamma()), options_(options) {
  if (n < 1) throw DomainError("phase field needs n >= 1");
  const auto& prof = spec.offdiag();
  a_ = prof(static_cast<double>(n));
  da_ = prof.delta(static_cast<double>(n));
  phi_sup_ = 0.0;
  phi_c2_ = 0.0;
  constexpr int kGrid = 4096;
  for (int j = 0; j < kGrid; ++j) {
    const double xi = kTwoPi * j / kGrid;
    phi_sup_ = std::max(phi_sup_, std::abs(phi(xi)));
    phi_c2_ = std::max({phi_c2_, std::abs(phi(xi)), std::abs(phi_prime(xi)), std::abs(phi_second(xi))});
  }
  if (phi_c2_ > 0.5) {
    throw DomainError("n too small: C2 norm of phi_n is " + std::to_string(phi_c2_) + " > 1/2");
  }
}

double PhaseField::phi(double xi) const { return 2.0 * da_ * (1.0 - da_ * std::cos(xi)) * std::sin(xi); }

double PhaseField::phi_prime(double xi) const {
  return 2.0 * da_ * (std::cos(xi) - da_ * std::cos(2.0 * xi));
}

double PhaseField::phi_second(double xi) const {
  return 2.0 * da_ * (-std::sin(xi) + 2.0 * da_ * std::sin(2.0 * xi));
}

double PhaseField::xi_of_eta(double eta) const {
  if (da_ == 0.0) return eta;
  double lo = eta - phi_sup_ - 1e-12;
  double hi = eta + phi_sup_ + 1e-12;
  double xi = eta;
  for (int it = 0; it < 100; ++it) {
    const double F = xi - phi(xi) - eta;
    if (F == 0.0) return xi;
    if (F > 0.0) {
      hi = std::min(hi, xi);
    } else {
      lo = std::max(lo, xi);
    }
    double next = xi - F / (1.0 - phi_prime(xi));
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - xi) <= 4e-16 * std::max(1.0, std::abs(eta))) return next;
    xi = next;
  }
  return xi;
}

double PhaseField::psi1(double omega, double t, double xi) const {
  return psi1_formula(a_, omega, t, xi);
}

double PhaseField::psi1_im(double omega, double t, double xi) const {
  return 2.0 * a_ * (z_single(omega, t) * std::polar(1.0, xi)).imag();
}

double PhaseField::psi1_vec(std::span<const double> omegas, std::span<const double> times,
                            double xi) const {
  return psi1_recursive(a_, omegas, times, xi);
}

double PhaseField::psi2_base(double xi) const { return -a_ * da_ * std::sin(2.0 * xi); }

double PhaseField::psi_I(double omega, double xi) const {
  // sin(omega) vanishes exactly at omega = pi.
  const double s = omega == kPi ? 0.0 : std::sin(omega);
  return 2.0 * a_ * da_ * s * std::cos(2.0 * xi - omega);
}

double PhaseField::psi_I_direct(double omega, double xi) const {
  return psi2_base(xi - omega) - psi2_base(xi);
}

double PhaseField::psi_II(double omega, double eta) const {
  return psi1(omega, 0.0, xi_of_eta(eta)) - psi1(omega, 0.0, eta);
}

double PhaseField::r_omega(double omega, double eta) const {
  return psi_I(omega, xi_of_eta(eta)) - psi_I(omega, eta);
}

double PhaseField::psi2(double omega, double t, double xi) const {
  const double x = xi - t;
  return psi_II(omega, x) + psi_I(omega, xi_of_eta(x));
}

double PhaseField::phi1(double omega, double t, double xi) const {
  const double x = xi_of_eta(xi - t);
  return phi(x - omega) - phi(x);
}

double PhaseField::xi_of_eta_shifted(double omega, double t, double eta) const {
  double xi = eta;
  for (int it = 0; it < 200; ++it) {
    const double next = eta + phi1(omega, t, xi);
    if (std::abs(next - xi) <= 4e-16 * std::max(1.0, std::abs(eta))) return next;
    xi = next;
  }
  throw AccuracyError("fixed point for the shifted change of variable did not converge");
}

double PhaseField::psi2_vec(std::span<const double> omegas, std::span<const double> times,
                            double xi) const {
  if (!options_.proof_exploration) {
    throw DomainError("psi_{n,2} for nu >= 2 needs the proof-exploration option");
  }
  const std::size_t nu = omegas.size();
  if (nu == 0 || nu != times.size()) throw DomainError("psi2_vec: bad lengths");
  if (nu == 1) return psi2(omegas[0], times[0], xi);
  const double w = omegas[nu - 1];
  const double t = times[nu - 1];
  const double wbar = kTwoPi - w;
  const auto wp = omegas.first(nu - 1);
  const auto tp = times.first(nu - 1);
  const double x = xi - w;
  const double y = xi_of_eta_shifted(w, t, x);
  return psi1(wbar, t, x) - psi1(wbar, t, y) + psi2_vec(wp, tp, x) - psi2(wbar, t, x) +
         psi1_vec(wp, tp, y) - psi1_vec(wp, tp, x);
}

PhaseField build_phase_field(const ModelSpec& spec, long n, PhaseOptions options) {
  return PhaseField(spec, n, options);
}

Psi1Report psi1_recursion_check(std::span<const double> omegas, std::span<const double> times,
                                const ModelSpec& spec, long n, int grid) {
  const auto state = z_state(omegas, times, spec.period());
  const double a = spec.offdiag()(static_cast<double>(n));
  Psi1Report r;
  r.tolerance = 1e-10 * std::max(a, 1e-300);
  for (int j = 0; j < grid; ++j) {
    const double xi = kTwoPi * j / grid;
    const double direct = 2.0 * a * (state.z * std::polar(1.0, xi)).imag();
    const double rec = psi1_recursive(a, omegas, times, xi);
    r.max_deviation = std::max(r.max_deviation, std::abs(direct - rec));
  }
  r.pass = r.max_deviation < r.tolerance;
  return r;
}

DecaySample lemma82_sample(const PhaseField& field, double omega, int grid) {
  DecaySample d;
  for (int j = 0; j < grid; ++j) {
    d.r_sup = std::max(d.r_sup, std::abs(field.r_omega(omega, kTwoPi * j / grid)));
  }
  d.psi_II_stationary = std::max(std::abs(field.psi_II(omega, omega / 2.0)),
                                 std::abs(field.psi_II(omega, omega / 2.0 + kPi)));
  return d;
}

}  // namespace rabi
