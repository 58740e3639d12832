#include "rabi/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rabi/errors.hpp"

namespace rabi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Coupling constants below this are treated as exactly zero.
constexpr double kZeroCoupling = 1e-200;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

long floor_mod(long k, long n) {
  long r = k % n;
  return r < 0 ? r + n : r;
}

// x^p ((1 + h/x)^p - 1), accurate for small h/x.
double power_difference(double x, double h, double p) {
  return std::pow(x, p) * std::expm1(p * std::log1p(h / x));
}

}  // namespace

void RabiParams::validate() const {
  if (!positive_finite(omega) || !positive_finite(E) || !positive_finite(g) ||
      !positive_finite(hbar)) {
    throw DomainError("Rabi parameters omega, E, g, hbar must be finite and > 0");
  }
}

PeriodicPotential PeriodicPotential::from_values(std::vector<double> values) {
  const auto N = static_cast<long>(values.size());
  if (N < 2) throw DomainError("periodic potential needs period N >= 2");
  for (double x : values) {
    if (!std::isfinite(x)) throw DomainError("periodic potential values must be finite");
  }
  PeriodicPotential p;
  p.values_ = std::move(values);
  double sum = 0.0;
  for (double x : p.values_) sum += x;
  p.alpha0_ = sum / static_cast<double>(N);

  const int mc = static_cast<int>(N / 2);
  const int ms = static_cast<int>((N - 1) / 2);
  p.alpha_.assign(mc, 0.0);
  p.alpha_tilde_.assign(ms, 0.0);
  for (int m = 1; m <= mc; ++m) {
    double c = 0.0;
    double s = 0.0;
    for (long k = 1; k <= N; ++k) {
      const long r = floor_mod(static_cast<long>(m) * k, N);
      const double angle = kTwoPi * static_cast<double>(r) / static_cast<double>(N);
      c += p.values_[k - 1] * std::cos(angle);
      s += p.values_[k - 1] * std::sin(angle);
    }
    const bool nyquist = 2L * m == N;
    const double w = nyquist ? 1.0 / static_cast<double>(N) : 2.0 / static_cast<double>(N);
    p.alpha_[m - 1] = w * c;
    if (m <= ms) p.alpha_tilde_[m - 1] = w * s;
  }
  for (double x : p.values_) p.rho_N_ = std::max(p.rho_N_, std::abs(x - p.alpha0_));
  return p;
}

PeriodicPotential fourier_decompose(std::span<const double> values) {
  return PeriodicPotential::from_values(std::vector<double>(values.begin(), values.end()));
}

double PeriodicPotential::operator()(long k) const {
  const long N = period();
  return values_[floor_mod(k - 1, N)];
}

double PeriodicPotential::alpha(int m) const {
  return (m >= 1 && m <= max_cos_mode()) ? alpha_[m - 1] : 0.0;
}

double PeriodicPotential::alpha_tilde(int m) const {
  return (m >= 1 && m <= max_sin_mode()) ? alpha_tilde_[m - 1] : 0.0;
}

double PeriodicPotential::reconstruct(long k) const {
  const long N = period();
  double v = alpha0_;
  for (int m = 1; m <= max_cos_mode(); ++m) {
    const double angle = kTwoPi * static_cast<double>(floor_mod(m * k, N)) / static_cast<double>(N);
    v += alpha_[m - 1] * std::cos(angle);
    if (m <= max_sin_mode()) v += alpha_tilde_[m - 1] * std::sin(angle);
  }
  return v;
}

double PeriodicPotential::smallness_limit() const {
  if (period() == 2) return 0.5;
  return 1.0 / (std::numbers::pi * std::sqrt(static_cast<double>(period())));
}

bool PeriodicPotential::smallness_holds() const { return rho_N_ < smallness_limit(); }

bool PeriodicPotential::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
}

PeriodicPotential PeriodicPotential::shifted(double c) const {
  std::vector<double> v = values_;
  for (double& x : v) x += c;
  return from_values(std::move(v));
}

void OffDiagonalProfile::validate() const {
  if (!std::isfinite(a1) || a1 < 0.0) throw DomainError("a1 must be finite and >= 0");
  if (!std::isfinite(a1prime)) throw DomainError("a1prime must be finite");
  if (!std::isfinite(gamma) || gamma <= 0.0 || gamma > 0.5) {
    throw DomainError("gamma must lie in (0, 1/2]");
  }
}

double OffDiagonalProfile::operator()(double k) const {
  if (k <= 0.0 || is_zero()) return 0.0;
  double a = a1 * std::pow(k, gamma);
  if (a1prime != 0.0) a += a1prime * std::pow(k, gamma - 1.0);
  return a;
}

double OffDiagonalProfile::difference(double x, double h) const {
  if (is_zero() || h == 0.0) return 0.0;
  const double y = x + h;
  if (x <= 0.0 || y <= 0.0) return (*this)(y) - (*this)(x);
  double d = a1 * power_difference(x, h, gamma);
  if (a1prime != 0.0) d += a1prime * power_difference(x, h, gamma - 1.0);
  return d;
}

HypothesisConstants certify_profile(const OffDiagonalProfile& a, long K) {
  HypothesisConstants hc;
  hc.sampled_to = K;
  if (a.is_zero() || a.a1 <= 0.0) return hc;
  // a1 k + a1prime > 0 exactly when k > -a1prime / a1.
  hc.k0 = std::max(1L, static_cast<long>(std::floor(-a.a1prime / a.a1)) + 1);
  const double g = a.gamma;
  // Limits of the normalized ratios as k -> infinity; each ratio is a
  // rational function of k^(-1) plus O(k^-2), hence monotone for large k.
  double lo = a.a1;
  double hi = a.a1;
  double c1 = g * a.a1;
  double c2 = g * (1.0 - g) * a.a1;
  for (long k = hc.k0; k <= K; ++k) {
    const double x = static_cast<double>(k);
    const double r = a(x) / std::pow(x, g);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    c1 = std::max(c1, std::abs(a.delta(x)) / std::pow(x, g - 1.0));
    c2 = std::max(c2, std::abs(a.delta2(x)) / std::pow(x, g - 2.0));
  }
  hc.c = lo;
  hc.C = hi;
  hc.C1 = c1;
  hc.C2 = c2;
  hc.holds = lo > 0.0;
  return hc;
}

ModelSpec::ModelSpec(Mode mode, OffDiagonalProfile offdiag, PeriodicPotential potential)
    : mode_(mode), offdiag_(offdiag), potential_(std::move(potential)) {
  if (std::isfinite(offdiag_.a1) && offdiag_.a1 >= 0.0 && offdiag_.a1 < kZeroCoupling) {
    offdiag_.a1 = 0.0;
  }
  offdiag_.validate();
  if (potential_.period() < 2) throw DomainError("periodic potential needs period N >= 2");
  if (mode_ == Mode::H0) {
    if (potential_.period() != 2) throw DomainError("H0 mode requires N = 2");
    if (offdiag_.gamma != 0.5 || offdiag_.a1prime != 0.0) {
      throw DomainError("H0 mode requires a(k) = a1 sqrt(k)");
    }
    const auto& v = potential_.values();
    if (v[0] != -v[1]) throw DomainError("H0 mode requires v(k) = (-1)^k rho");
  }
}

ModelSpec ModelSpec::h0(double a1, double rho) {
  if (!std::isfinite(rho)) throw DomainError("rho must be finite");
  return ModelSpec(Mode::H0, OffDiagonalProfile{a1, 0.5, 0.0},
                   PeriodicPotential::from_values({0.0 - rho, rho}));
}

ModelSpec ModelSpec::h12(OffDiagonalProfile offdiag, PeriodicPotential potential) {
  return ModelSpec(Mode::H12, offdiag, std::move(potential));
}

bool ModelSpec::smallness_holds() const {
  return mode_ == Mode::H0 || potential_.smallness_holds();
}

ModelSpec ModelSpec::centered() const {
  if (potential_.alpha0() == 0.0) return *this;
  ModelSpec out = *this;
  out.potential_ = potential_.shifted(-potential_.alpha0());
  return out;
}

RabiJacobi rabi_to_jacobi(const RabiParams& params, Branch branch) {
  params.validate();
  const double rho = params.E / (2.0 * params.hbar * params.omega);
  RabiJacobi out;
  out.spec = ModelSpec::h0(params.g / params.omega, branch == Branch::plus ? rho : -rho);
  out.map = SpectralMap{-0.5 * params.hbar * params.omega, params.hbar * params.omega};
  out.branch = branch;
  return out;
}

std::vector<EntryPair> entries(const ModelSpec& spec, long k_lo, long k_hi) {
  if (k_lo < 1 || k_hi < k_lo) throw DomainError("entries: need 1 <= k_lo <= k_hi");
  std::vector<EntryPair> out;
  out.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
  for (long k = k_lo; k <= k_hi; ++k) {
    out.push_back({k, spec.d(k), spec.a(k)});
  }
  return out;
}

std::string to_string(Mode mode) { return mode == Mode::H0 ? "H0" : "H12"; }

}  // namespace rabi
