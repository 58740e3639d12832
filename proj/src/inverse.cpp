#include "rabi/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "rabi/asymptotics.hpp"
#include "rabi/errors.hpp"
#include "rabi/fit.hpp"

namespace rabi {

namespace {

// Unit-amplitude oscillatory template; the a1 -> 0 limit is the bare alternation.
double unit_template(double a1, long n) {
  if (a1 < 1e-8) return n % 2 == 0 ? 1.0 : -1.0;
  return r_of_n_h0(a1, 1.0, static_cast<double>(n));
}

struct Projection {
  double dot = 0.0;
  double norm2 = 0.0;
};

Projection project(const std::vector<long>& n, const std::vector<double>& d, double a1) {
  Projection p;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double s = unit_template(a1, n[i]);
    p.dot += d[i] * s;
    p.norm2 += s * s;
  }
  return p;
}

// d/da of the squared response times |s|^4: (d.s')(s.s) - (d.s)(s.s'); vanishes at the peak.
double stationarity(const std::vector<long>& n, const std::vector<double>& d, double a1) {
  const double pi = std::numbers::pi;
  double ds = 0.0, ss = 0.0, dsp = 0.0, ssp = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = static_cast<double>(n[i]);
    const double sign = n[i] % 2 == 0 ? 1.0 : -1.0;
    const double th = 4.0 * a1 * std::sqrt(x) - pi / 4.0;
    const double amp = sign * std::pow(x, -0.25) / std::sqrt(2.0 * pi);
    const double s = amp * std::cos(th) / std::sqrt(a1);
    const double sp = amp * (-4.0 * std::sqrt(x) * std::sin(th) / std::sqrt(a1) - 0.5 * std::cos(th) / (a1 * std::sqrt(a1)));
    ds += d[i] * s;
    ss += s * s;
    dsp += d[i] * sp;
    ssp += s * sp;
  }
  return dsp * ss - ds * ssp;
}

double response(const std::vector<long>& n, const std::vector<double>& d, double a1) {
  const auto p = project(n, d, a1);
  return p.norm2 > 0.0 ? std::abs(p.dot) / std::sqrt(p.norm2) : 0.0;
}

std::map<long, double> by_index(const BranchSpectrum& s, const char* name) {
  if (s.n.size() != s.lambda.size()) {
    throw DomainError(std::string(name) + " spectrum: n and lambda differ in length");
  }
  std::map<long, double> out;
  for (std::size_t i = 0; i < s.n.size(); ++i) {
    if (!std::isfinite(s.lambda[i])) throw DomainError(std::string(name) + " spectrum: non-finite value");
    if (!out.emplace(s.n[i], s.lambda[i]).second) {
      throw DomainError(std::string(name) + " spectrum: duplicate n = " + std::to_string(s.n[i]));
    }
  }
  return out;
}

// Median of (y[i+L] - y[i]) / (n[i+L] - n[i]) over [lo, hi) with lag L = half the range;
// the long baseline suppresses both rounding and the oscillatory term.
double median_spacing(const std::vector<long>& n, const std::vector<double>& y, std::size_t lo,
                      std::size_t hi) {
  const std::size_t lag = std::max<std::size_t>(1, (hi - lo) / 2);
  std::vector<double> d;
  for (std::size_t i = lo; i + lag < hi; ++i) {
    d.push_back((y[i + lag] - y[i]) / static_cast<double>(n[i + lag] - n[i]));
  }
  return median(d);
}

}  // namespace

double three_term_physical(const RabiParams& params, Branch branch, long n) {
  const double hw = params.hbar * params.omega;
  const double a1 = params.g / params.omega;
  double rho = params.E / (2.0 * hw);
  if (branch == Branch::minus) rho = -rho;
  const double r = a1 > 0.0 ? r_of_n_h0(a1, rho, static_cast<double>(n))
                            : (n % 2 == 0 ? rho : -rho);
  return -0.5 * hw + hw * (static_cast<double>(n) - a1 * a1 + r);
}

RecoveryResult recover_parameters(const BranchSpectrum& plus, const BranchSpectrum& minus,
                                  double hbar, const RecoveryOptions& options) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw DomainError("hbar must be positive");
  const auto mp = by_index(plus, "plus");
  const auto mm = by_index(minus, "minus");

  std::vector<long> n;
  std::vector<double> avg, dif;
  for (const auto& [k, lp] : mp) {
    const auto it = mm.find(k);
    if (it == mm.end()) continue;
    if (k < 1) throw DomainError("spectrum indices must be >= 1");
    n.push_back(k);
    avg.push_back(0.5 * (lp + it->second));
    dif.push_back(0.5 * (lp - it->second));
  }
  if (n.size() < 16) throw DomainError("recover needs at least 16 indices common to both branches");
  if (n.back() < 4 * n.front()) {
    throw DomainError("recover needs n_max / n_min >= 4; got " + std::to_string(n.front()) + ".." +
                      std::to_string(n.back()));
  }

  RecoveryResult res;
  res.n_min = n.front();
  res.n_max = n.back();
  res.count = n.size();

  const std::size_t m = n.size();
  const double hw = median_spacing(n, avg, 0, m);
  if (!(hw > 0.0)) throw ModelMismatchError("median level spacing is not positive");
  const double lower = median_spacing(n, avg, 0, m / 2 + 1);
  const double upper = median_spacing(n, avg, m / 2, m);
  res.spacing_trend = std::abs(upper - lower) / hw;
  if (res.spacing_trend > options.trend_tol) {
    throw ModelMismatchError("level spacing drifts between the halves of the range: " +
                             std::to_string(lower) + " vs " + std::to_string(upper));
  }

  std::vector<double> offs(m), d(m);
  for (std::size_t i = 0; i < m; ++i) {
    offs[i] = static_cast<double>(n[i]) - 0.5 - avg[i] / hw;
    d[i] = dif[i] / hw;
  }
  const double a1sq = median(offs);
  double a1 = a1sq > 0.0 ? std::sqrt(a1sq) : 0.0;

  if (a1 >= 1e-8) {
    double lo = a1 * (1.0 - options.relative_window);
    double hi = a1 * (1.0 + options.relative_window);
    const int G = std::max(options.grid, 3);
    const double step = (hi - lo) / (G - 1);
    double best = a1, best_resp = -1.0;
    for (int j = 0; j < G; ++j) {
      const double x = lo + step * j;
      const double r = response(n, d, x);
      if (r > best_resp) {
        best_resp = r;
        best = x;
      }
    }
    lo = best - step;
    hi = best + step;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < options.golden_iterations; ++it) {
      const double c = hi - phi * (hi - lo);
      const double e = lo + phi * (hi - lo);
      if (response(n, d, c) > response(n, d, e)) {
        hi = e;
      } else {
        lo = c;
      }
    }
    double refined = 0.5 * (lo + hi);
    // The response is flat at its peak, so comparisons locate it only to ~sqrt(eps);
    // bisect the stationarity condition inside the grid cell for full precision.
    double blo = best - step, bhi = best + step;
    double flo = stationarity(n, d, blo), fhi = stationarity(n, d, bhi);
    if (flo * fhi < 0.0) {
      for (int it = 0; it < 200 && bhi - blo > 0.0; ++it) {
        const double mid = 0.5 * (blo + bhi);
        if (mid <= blo || mid >= bhi) break;
        const double fm = stationarity(n, d, mid);
        if (fm == 0.0) {
          blo = bhi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          blo = mid;
          flo = fm;
        } else {
          bhi = mid;
        }
      }
      refined = 0.5 * (blo + bhi);
    }
    // Without a detectable oscillation the offset estimate stands.
    if (response(n, d, refined) > 0.0) a1 = refined;
  }

  const auto p = project(n, d, a1);
  const double rho = p.norm2 > 0.0 ? p.dot / p.norm2 : 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = d[i] - rho * unit_template(a1, n[i]);
    ss += e * e;
  }
  const double se = p.norm2 > 0.0 ? std::sqrt(ss / static_cast<double>(m - 1) / p.norm2) : 0.0;
  res.rho_raw = rho;
  res.rho_confidence = options.noise_sigmas * se;
  res.rho_below_noise = std::abs(rho) <= res.rho_confidence;
  res.rho = res.rho_below_noise ? 0.0 : rho;
  res.a1 = a1;

  res.params.hbar = hbar;
  res.params.omega = hw / hbar;
  res.params.g = a1 * res.params.omega;
  res.params.E = 2.0 * hw * res.rho;

  double rs = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double hwa = hw * (static_cast<double>(n[i]) - 0.5 - a1 * a1);
    const double osc = hw * res.rho * unit_template(a1, n[i]);
    const double ep = avg[i] + dif[i] - (hwa + osc);
    const double em = avg[i] - dif[i] - (hwa - osc);
    rs += ep * ep + em * em;
  }
  res.rms = std::sqrt(rs / (2.0 * static_cast<double>(m)));
  return res;
}

}  // namespace rabi
