#include "rabi/oscillatory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <random>

#include "rabi/errors.hpp"

namespace rabi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
const cplx kI(0.0, 1.0);

}  // namespace

double PeriodicSymbol::c2_norm(int grid) const {
  double m = 0.0;
  for (int j = 0; j < grid; ++j) {
    const Jet b = jet(kTwoPi * j / grid);
    m = std::max({m, std::abs(b.v), std::abs(b.d), std::abs(b.dd)});
  }
  return m;
}

double PeriodicSymbol::periodicity_defect() const {
  return std::abs((*this)(0.0) - (*this)(kTwoPi));
}

PeriodicSymbol PeriodicSymbol::rotated(double c) const {
  auto f = fn;
  return {name + "_rot", [f, c](const Jet& x) { return f(x - c); }};
}

cplx integral_I(const PeriodicSymbol& b, double mu, double eta0, QuadratureReport* report) {
  if (!std::isfinite(mu) || !std::isfinite(eta0)) throw DomainError("integral_I: mu and eta0 must be finite");
  auto f = [&](double eta) { return std::polar(1.0, mu * std::cos(eta - eta0)) * b(eta); };
  constexpr std::size_t kCap = std::size_t{1} << 20;
  std::size_t N = 64;
  cplx S(0.0);
  for (std::size_t j = 0; j < N; ++j) S += f(kTwoPi * static_cast<double>(j) / static_cast<double>(N));
  cplx I = S / static_cast<double>(N);
  std::size_t evals = N;
  while (2 * N <= kCap) {
    cplx odd(0.0);
    for (std::size_t j = 0; j < N; ++j) {
      odd += f(kTwoPi * (2.0 * static_cast<double>(j) + 1.0) / (2.0 * static_cast<double>(N)));
    }
    evals += N;
    S += odd;
    N *= 2;
    const cplx next = S / static_cast<double>(N);
    const double change = std::abs(next - I);
    I = next;
    // The integrand's band limit is about |mu| plus the symbol's own bandwidth.
    if (change < 1e-12 * (1.0 + std::abs(I)) && static_cast<double>(N) >= std::abs(mu) + 32.0) {
      if (report) {
        report->evaluations = evals;
        report->last_change = change;
      }
      return I;
    }
  }
  throw AccuracyError("integral_I: trapezoidal rule did not converge within 2^20 points");
}

StationaryPhase stationary_phase(const PeriodicSymbol& b, double mu, double eta0, double C0) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("stationary_phase needs mu > 0");
  const double amp = 1.0 / std::sqrt(kTwoPi * mu);
  const cplx plus = std::polar(amp, mu - kPi / 4.0) * b(eta0);
  const cplx minus = std::polar(amp, -(mu - kPi / 4.0)) * b(eta0 + kPi);
  return {plus + minus, C0 * b.c2_norm() / mu};
}

namespace {

PeriodicSymbol sym(std::string name, std::function<Jet(const Jet&)> fn) {
  return {std::move(name), std::move(fn)};
}

}  // namespace

std::vector<PeriodicSymbol> stationary_phase_family() {
  return {
      sym("one", [](const Jet&) { return Jet::constant(1.0); }),
      sym("exp_i1", [](const Jet& x) { return expi(x); }),
      sym("exp_i_minus2", [](const Jet& x) { return expi(-2.0 * x); }),
      sym("cos3", [](const Jet& x) { return cos(3.0 * x); }),
      sym("sin1_plus_half_cos2", [](const Jet& x) { return sin(x) + 0.5 * cos(2.0 * x); }),
      sym("phase_half_sin", [](const Jet& x) { return expi(0.5 * sin(x)); }),
      sym("phase_cos2", [](const Jet& x) { return expi(cos(2.0 * x)); }),
      sym("poisson_2", [](const Jet& x) { return 1.0 / (2.0 - cos(x)); }),
      sym("poisson_shifted", [](const Jet& x) { return 1.0 / (1.5 + sin(x - 0.3)); }),
      sym("exp_cos", [](const Jet& x) { return exp(cos(x)); }),
      sym("exp_half_sin2_times_exp_i1", [](const Jet& x) { return exp(0.5 * sin(2.0 * x)) * expi(x); }),
      sym("inverse_square", [](const Jet& x) { return pow(1.0 + 0.3 * cos(x), -2.0); }),
      sym("exp_i4", [](const Jet& x) { return expi(4.0 * x); }),
      sym("cos_squared", [](const Jet& x) { return cos(x) * cos(x); }),
      sym("sin1", [](const Jet& x) { return sin(x); }),
      sym("phase_minus2_sin2", [](const Jet& x) { return expi(-2.0 * sin(2.0 * x)); }),
      sym("poisson_2x", [](const Jet& x) { return 1.0 / (1.25 - cos(2.0 * x)); }),
      sym("log_2_plus_cos", [](const Jet& x) { return log(2.0 + cos(x)); }),
      sym("mixed", [](const Jet& x) { return (1.0 + cplx(0.0, 0.5) * sin(x)) * exp(-0.25 * cos(3.0 * x)); }),
      sym("exp_i1_cos5", [](const Jet& x) { return expi(x) * cos(5.0 * x); }),
  };
}

std::vector<PeriodicSymbol> calibration_symbols() {
  std::vector<PeriodicSymbol> out;
  for (int p = 1; p <= 6; ++p) {
    out.push_back(sym("cal_cos" + std::to_string(p), [p](const Jet& x) { return cos(p * x + 0.7); }));
  }
  for (double eps : {0.3, 1.5, 3.0}) {
    for (int q : {1, 2}) {
      out.push_back(sym("cal_phase_" + std::to_string(eps) + "_" + std::to_string(q),
                        [eps, q](const Jet& x) { return expi(eps * sin(q * x)); }));
    }
  }
  for (double r : {1.5, 3.0}) {
    out.push_back(sym("cal_poisson_" + std::to_string(r), [r](const Jet& x) { return 1.0 / (r - cos(x)); }));
  }
  for (double c : {0.5, 1.5}) {
    out.push_back(sym("cal_exp_" + std::to_string(c), [c](const Jet& x) { return exp(c * cos(x + 0.4)); }));
  }
  return out;
}

double g_frak(const ModelSpec& spec, long n, long k) {
  if (spec.period() != 2) throw DomainError("g_frak needs N = 2");
  if (n < 1) throw DomainError("g_frak needs n >= 1");
  const double window = std::pow(static_cast<double>(n), spec.gamma());
  if (std::abs(static_cast<double>(k - n)) > window) {
    throw DomainError("g_frak: |k - n| exceeds n^gamma");
  }
  const double rho = spec.potential().alpha(1);
  if (rho == 0.0) return 0.0;
  const auto& prof = spec.offdiag();
  const double da = prof.delta(static_cast<double>(n));
  const double A = prof(static_cast<double>(n)) + static_cast<double>(k - n) * da;
  if (!(A > 0.0)) throw DomainError("g_frak needs a(n) > 0");
  // e^{i phi~} = e^{i 4A cos(xi + pi/2)} e^{-4 i A da sin 2 xi}
  const double c = -4.0 * A * da;
  const PeriodicSymbol b{"g_frak_symbol", [c](const Jet& x) { return expi(c * sin(2.0 * x)); }};
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return sign * rho * integral_I(b, 4.0 * A, -kPi / 2.0).real();
}

double g_frak_generalN(const ModelSpec& spec, long n) {
  if (n < 1) throw DomainError("g_frak_generalN needs n >= 1");
  const int N = spec.period();
  const auto& v = spec.potential();
  const auto& prof = spec.offdiag();
  const double x = static_cast<double>(n);
  const double a = prof(x);
  const double da = prof.delta(x);
  double out = 0.0;
  for (int m = 1; m <= v.max_cos_mode(); ++m) {
    const double am = v.alpha(m);
    const double bm = v.alpha_tilde(m);
    if (am == 0.0 && bm == 0.0) continue;
    if (!(a > 0.0)) throw DomainError("g_frak_generalN needs a(n) > 0");
    const double omega = kTwoPi * m / N;
    const double s = (2 * m == N) ? 1.0 : std::sin(omega / 2.0);
    const double sin_omega = (2 * m == N) ? 0.0 : std::sin(omega);
    // b = e^{i psi_I}, psi_I(xi) = 2 a da sin(omega) cos(2 xi - omega)
    const double amp = 2.0 * a * da * sin_omega;
    const PeriodicSymbol b{"psi_I_phase", [amp, omega](const Jet& xi) {
                             return expi(amp * cos(2.0 * xi - omega));
                           }};
    const auto sp = stationary_phase(b, 4.0 * a * s, kPi + omega / 2.0);
    const double reduced = kTwoPi * static_cast<double>((static_cast<long>(m) * n) % N) / N;
    const cplx g = std::polar(1.0, reduced) * sp.main_term;
    out += am * g.real() + bm * g.imag();
  }
  return out;
}

void CorputIntegrand::validate() const {
  if (!b) throw DomainError("Corput integrand has no symbol");
  if (!(t1 <= t2) || !std::isfinite(t1) || !std::isfinite(t2)) throw DomainError("Corput integrand needs t1 <= t2");
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) throw DomainError("Corput integrand needs zeta >= 0");
  if (mu == 0.0 || !std::isfinite(mu)) throw DomainError("Corput integrand needs mu != 0");
}

double CorputIntegrand::M_norm() const {
  validate();
  constexpr int kGrid = 20000;
  const double h = (t2 - t1) / kGrid;
  double sup = 0.0;
  double tv = 0.0;
  double prev = 0.0;
  for (int j = 0; j <= kGrid; ++j) {
    const Jet v = b(Jet::variable(t1 + h * j));
    sup = std::max(sup, std::abs(v.v));
    const double d = std::abs(v.d);
    if (j > 0) tv += 0.5 * h * (prev + d);
    prev = d;
  }
  return sup + tv;
}

namespace {

// Gauss-Kronrod 7/15 on [-1, 1].
constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Integration segment: t = base + sign * u^2 when substituted, t = u otherwise.
struct Segment {
  double u0, u1;
  double base;
  double sign;
  bool substituted;
};

struct PanelResult {
  cplx value;
  double error;
  double abs_value;
};

class CorputEvaluator {
 public:
  explicit CorputEvaluator(const CorputIntegrand& ci) : ci_(ci) {}

  // Integrand times the Jacobian at parameter u on segment s.
  cplx operator()(const Segment& s, double u) const {
    double t, half_sine;
    double jac = 1.0;
    if (s.substituted) {
      const double delta = s.sign * u * u;
      t = s.base + delta;
      // base is a multiple of 2 pi, so |sin(t/2)| = |sin(delta/2)|.
      half_sine = std::sin(delta / 2.0);
      jac = 2.0 * u;
    } else {
      t = u;
      half_sine = std::sin(t / 2.0);
    }
    const double q = 4.0 * half_sine * half_sine + ci_.zeta * ci_.zeta;
    if (q == 0.0) return 0.0;
    const double root = std::sqrt(q);
    return std::polar(jac / std::sqrt(root), ci_.mu * root) * ci_.b(Jet::variable(t)).v;
  }

  PanelResult panel(const Segment& s, double a, double b) const {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const cplx fc = (*this)(s, c);
    cplx k = fc * kWgk[7];
    cplx g = fc * kWg[3];
    double absk = std::abs(fc) * kWgk[7];
    for (int j = 0; j < 7; ++j) {
      const double dx = h * kXgk[j];
      const cplx f1 = (*this)(s, c - dx);
      const cplx f2 = (*this)(s, c + dx);
      k += kWgk[j] * (f1 + f2);
      absk += kWgk[j] * (std::abs(f1) + std::abs(f2));
      if (j % 2 == 1) g += kWg[j / 2] * (f1 + f2);
    }
    return {k * h, std::abs((k - g) * h), absk * std::abs(h)};
  }

 private:
  const CorputIntegrand& ci_;
};

std::vector<Segment> corput_segments(const CorputIntegrand& ci) {
  std::vector<double> cuts{ci.t1};
  for (long k = static_cast<long>(std::ceil(ci.t1 / kTwoPi)); k * kTwoPi <= ci.t2; ++k) {
    const double c = k * kTwoPi;
    if (c > ci.t1 && c < ci.t2) cuts.push_back(c);
  }
  cuts.push_back(ci.t2);
  auto singular = [](double t) {
    const double k = std::round(t / kTwoPi);
    return std::abs(t - k * kTwoPi) == 0.0;
  };
  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double l = cuts[i], r = cuts[i + 1];
    if (r <= l) continue;
    const bool sl = singular(l), sr = singular(r);
    if (sl && sr) {
      const double m = 0.5 * (l + r);
      segs.push_back({0.0, std::sqrt(m - l), l, 1.0, true});
      segs.push_back({0.0, std::sqrt(r - m), r, -1.0, true});
    } else if (sl) {
      segs.push_back({0.0, std::sqrt(r - l), l, 1.0, true});
    } else if (sr) {
      segs.push_back({0.0, std::sqrt(r - l), r, -1.0, true});
    } else {
      segs.push_back({l, r, 0.0, 1.0, false});
    }
  }
  return segs;
}

std::size_t initial_panels(const CorputIntegrand& ci, const Segment& s) {
  const double len = s.substituted ? s.u1 * s.u1 : s.u1 - s.u0;
  const double cycles = std::abs(ci.mu) * len / kTwoPi;
  return static_cast<std::size_t>(std::clamp(std::ceil(2.0 * cycles), 2.0, 200000.0));
}

}  // namespace

cplx integral_J(const CorputIntegrand& ci, double tol, Mesh mesh, AdaptiveReport* report) {
  ci.validate();
  if (ci.t1 == ci.t2) return 0.0;
  const CorputEvaluator eval(ci);
  const auto segs = corput_segments(ci);
  constexpr std::size_t kPanelCap = 4'000'000;

  if (mesh == Mesh::uniform_substituted) {
    std::vector<std::size_t> counts;
    for (const auto& s : segs) counts.push_back(initial_panels(ci, s));
    cplx prev(0.0);
    bool have_prev = false;
    for (int round = 0; round < 12; ++round) {
      cplx total(0.0);
      double abs_total = 0.0;
      std::size_t panels = 0;
      for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        const double h = (s.u1 - s.u0) / static_cast<double>(counts[i]);
        for (std::size_t j = 0; j < counts[i]; ++j) {
          const auto p = eval.panel(s, s.u0 + h * j, s.u0 + h * (j + 1));
          total += p.value;
          abs_total += p.abs_value;
        }
        panels += counts[i];
        counts[i] *= 2;
      }
      if (have_prev && std::abs(total - prev) <= tol * std::max(abs_total, 1e-300)) {
        if (report) *report = {panels, panels * 15, std::abs(total - prev)};
        return total;
      }
      if (panels * 2 > kPanelCap) break;
      prev = total;
      have_prev = true;
    }
    throw AccuracyError("integral_J: uniform mesh did not converge");
  }

  struct Item {
    std::size_t seg;
    double a, b;
    PanelResult r;
    bool operator<(const Item& o) const { return r.error < o.r.error; }
  };
  std::priority_queue<Item> queue;
  cplx total(0.0);
  double err = 0.0, abs_total = 0.0;
  std::size_t panels = 0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    const std::size_t count = initial_panels(ci, s);
    const double h = (s.u1 - s.u0) / static_cast<double>(count);
    for (std::size_t j = 0; j < count; ++j) {
      const double a = s.u0 + h * j, b = (j + 1 == count) ? s.u1 : s.u0 + h * (j + 1);
      Item it{i, a, b, eval.panel(s, a, b)};
      total += it.r.value;
      err += it.r.error;
      abs_total += it.r.abs_value;
      queue.push(it);
      ++panels;
    }
  }
  while (err > tol * std::max(abs_total, 1e-300)) {
    if (panels >= kPanelCap || queue.empty()) {
      throw AccuracyError("integral_J: adaptive refinement cap reached");
    }
    const Item worst = queue.top();
    queue.pop();
    const double m = 0.5 * (worst.a + worst.b);
    if (m <= worst.a || m >= worst.b) {
      throw AccuracyError("integral_J: panel width reached machine resolution");
    }
    Item left{worst.seg, worst.a, m, eval.panel(segs[worst.seg], worst.a, m)};
    Item right{worst.seg, m, worst.b, eval.panel(segs[worst.seg], m, worst.b)};
    total += left.r.value + right.r.value - worst.r.value;
    err += left.r.error + right.r.error - worst.r.error;
    abs_total += left.r.abs_value + right.r.abs_value - worst.r.abs_value;
    queue.push(left);
    queue.push(right);
    ++panels;
  }
  if (report) *report = {panels, panels * 15, err};
  return total;
}

double corput_bound(const CorputIntegrand& ci, double C) {
  ci.validate();
  return C * (1.0 + std::sqrt(ci.zeta)) / std::sqrt(std::abs(ci.mu)) * ci.M_norm();
}

CorputIntegrand random_corput_integrand(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&rng](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  CorputIntegrand ci;
  const int kind = static_cast<int>(rng() % 5);
  const double p = uni(-5.0, 5.0);
  const double c1 = uni(-1.0, 1.0);
  const double c2 = uni(-1.0, 1.0);
  const double phi = uni(0.0, kTwoPi);
  switch (kind) {
    case 0: ci.b = [p](const Jet& t) { return expi(p * t); }; break;
    case 1: ci.b = [c1, c2](const Jet& t) { return 1.0 + c1 * t + c2 * t * t; }; break;
    case 2: ci.b = [c1](const Jet& t) { return exp(c1 * t); }; break;
    case 3: ci.b = [p, phi](const Jet& t) { return cos(std::abs(p) * t + phi); }; break;
    default: ci.b = [p](const Jet& t) { return 1.0 / (2.0 + sin(0.6 * p * t)); }; break;
  }
  ci.zeta = uni(0.0, 1.0) < 0.2 ? 0.0 : uni(0.0, 3.0);
  ci.mu = std::pow(10.0, uni(1.0, 4.0));
  double a = uni(-kPi, kPi), b = uni(-kPi, kPi);
  if (a > b) std::swap(a, b);
  ci.t1 = a;
  ci.t2 = b;
  return ci;
}

}  // namespace rabi
