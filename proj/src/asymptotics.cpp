#include "rabi/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rabi/errors.hpp"
#include "rabi/fit.hpp"

namespace rabi {

namespace {

constexpr double kPi = std::numbers::pi;

// 2 pi (m n mod N) / N, reduced before scaling so large n loses no digits.
double mode_angle(int m, double n, int N) {
  double r = std::fmod(static_cast<double>(m) * n, static_cast<double>(N));
  if (r < 0) r += N;
  return 2.0 * kPi * r / static_cast<double>(N);
}

double sin_two_pi_ratio(int m, int N) {
  if (2 * m == N) return 0.0;
  return std::sin(2.0 * kPi * m / N);
}

double sin_pi_ratio(int m, int N) {
  if (2 * m == N) return 1.0;
  return std::sin(kPi * m / N);
}

struct ModeTerms {
  double envelope;
  double phase;
};

ModeTerms mode_terms(const ModelSpec& spec, int m, double n) {
  const int N = spec.period();
  const auto& prof = spec.offdiag();
  const double a = prof(n);
  if (a <= 0.0) throw DomainError("r(n) needs a(n) > 0");
  const double da = prof.delta(n);
  const double s = sin_pi_ratio(m, N);
  const double env = std::cos(4.0 * a * s - kPi / 4.0) / std::sqrt(2.0 * kPi * a * s);
  const double phase = mode_angle(m, n, N) + 2.0 * a * da * sin_two_pi_ratio(m, N);
  return {env, phase};
}

}  // namespace

double r_cos_mode(const ModelSpec& spec, int m, double n) {
  const auto t = mode_terms(spec, m, n);
  return t.envelope * std::cos(t.phase);
}

double r_sin_mode(const ModelSpec& spec, int m, double n) {
  const auto t = mode_terms(spec, m, n);
  return t.envelope * std::sin(t.phase);
}

double r_of_n(const ModelSpec& spec, double n) {
  if (!(n >= 1.0)) throw DomainError("r(n) needs n >= 1");
  const auto& v = spec.potential();
  double r = 0.0;
  for (int m = 1; m <= v.max_cos_mode(); ++m) {
    if (v.alpha(m) != 0.0) r += v.alpha(m) * r_cos_mode(spec, m, n);
  }
  for (int m = 1; m <= v.max_sin_mode(); ++m) {
    if (v.alpha_tilde(m) != 0.0) r += v.alpha_tilde(m) * r_sin_mode(spec, m, n);
  }
  return r;
}

double r_of_n_h0(double a1, double rho, double n) {
  if (!(a1 > 0.0)) throw DomainError("r(n) needs a1 > 0");
  const double sign = std::cos(kPi * std::fmod(n, 2.0));
  return sign * rho * std::cos(4.0 * a1 * std::sqrt(n) - kPi / 4.0) /
         std::sqrt(2.0 * kPi * a1) * std::pow(n, -0.25);
}

double r_amplitude_bound(const ModelSpec& spec, double n) {
  const auto& v = spec.potential();
  double s = 0.0;
  for (int m = 1; m <= v.max_cos_mode(); ++m) s += std::abs(v.alpha(m));
  for (int m = 1; m <= v.max_sin_mode(); ++m) s += std::abs(v.alpha_tilde(m));
  const double a = spec.offdiag()(n);
  return s / std::sqrt(2.0 * kPi * a * sin_pi_ratio(1, spec.period()));
}

double two_term_offset(const ModelSpec& spec, long n) {
  const auto& prof = spec.offdiag();
  if (spec.mode() == Mode::H0) return -prof.a1 * prof.a1;
  const double x = static_cast<double>(n);
  const double am = prof(x - 1.0);
  const double a0 = prof(x);
  return -prof.difference(x - 1.0, 1.0) * (am + a0);
}

Source parse_source(const std::string& s) {
  if (s == "E0") return Source::E0;
  if (s == "E2") return Source::E2;
  if (s == "Y0") return Source::Y0;
  if (s == "GRWA") return Source::GRWA;
  throw DomainError("source must be one of E0, E2, Y0, GRWA");
}

std::string to_string(Source s) {
  switch (s) {
    case Source::E0: return "E0";
    case Source::E2: return "E2";
    case Source::Y0: return "Y0";
    case Source::GRWA: return "GRWA";
  }
  return "?";
}

PredictionRow predict(const ModelSpec& spec, long n, Source source, const GnProvider* provider) {
  if (n < 1) throw DomainError("predict needs n >= 1");
  const double g = spec.gamma();
  PredictionRow row;
  row.n = n;
  row.source = source;
  row.leading = static_cast<double>(n);
  row.offset = two_term_offset(spec, n) + spec.alpha0();
  switch (source) {
    case Source::E0: {
      const auto& prof = spec.offdiag();
      if (spec.period() != 2 || prof.gamma != 0.5 || prof.a1prime != 0.0 || spec.alpha0() != 0.0) {
        throw DomainError("E0 needs an H0-compatible model (N = 2, a(k) = a1 sqrt(k), zero mean)");
      }
      row.offset = -prof.a1 * prof.a1;
      row.oscillatory = prof.a1 == 0.0 ? 0.0 : r_of_n_h0(prof.a1, spec.rho(), static_cast<double>(n));
      row.remainder_exponent = -0.5;
      break;
    }
    case Source::E2:
      row.oscillatory = spec.potential().rho_N() == 0.0 ? 0.0 : r_of_n(spec, static_cast<double>(n));
      row.remainder_exponent = -g;
      break;
    case Source::Y0:
      row.oscillatory = 0.0;
      row.remainder_exponent = -g / 2.0;
      break;
    case Source::GRWA:
      if (provider == nullptr || !provider->fn) {
        throw DependencyError("GRWA prediction needs a g_n provider");
      }
      row.oscillatory = provider->fn(n);
      row.gn_provider = provider->name;
      row.remainder_exponent = -g;
      break;
  }
  row.prediction = row.leading + row.offset + row.oscillatory;
  return row;
}

PredictionTable predict_table(const ModelSpec& spec, const std::vector<long>& ns, Source source,
                              const GnProvider* provider) {
  PredictionTable t;
  t.reserve(ns.size());
  for (long n : ns) t.push_back(predict(spec, n, source, provider));
  return t;
}

FitReport residual_fit(const SpectrumSlice& lambdas, const PredictionTable& preds,
                       double exact_tol) {
  FitReport rep;
  rep.tolerance = exact_tol;
  std::vector<double> xs, two_term_resid, osc;
  for (const auto& p : preds) {
    if (p.n < lambdas.n_lo || p.n > lambdas.n_hi) continue;
    const double lam = lambdas.at(p.n);
    rep.n.push_back(p.n);
    rep.residual.push_back(lam - p.prediction);
    xs.push_back(static_cast<double>(p.n));
    two_term_resid.push_back(lam - (p.leading + p.offset));
    osc.push_back(p.oscillatory);
  }
  rep.count = rep.n.size();
  if (rep.count < 8) throw DomainError("residual fit needs at least 8 indices");
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if (*hi < 4.0 * *lo) throw DomainError("residual fit needs n spanning a factor >= 4");
  for (double r : rep.residual) rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(r));
  rep.correlation = pearson(two_term_resid, osc);
  if (rep.max_abs_residual <= exact_tol) {
    rep.exact = true;
    rep.slope = std::numeric_limits<double>::quiet_NaN();
    rep.intercept = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  const auto f = fit_loglog(xs, rep.residual);
  rep.slope = f.slope;
  rep.intercept = f.intercept;
  return rep;
}

}  // namespace rabi
