#pragma once

#include <complex>

namespace rabi {

// Value with first and second derivative in one real variable.
struct Jet {
  using C = std::complex<double>;
  C v{};
  C d{};
  C dd{};

  static Jet variable(double x) { return {C(x), C(1.0), C(0.0)}; }
  static Jet constant(C c) { return {c, C(0.0), C(0.0)}; }
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.d, -a.dd}; }
inline Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}
inline Jet operator*(Jet::C s, const Jet& a) { return {s * a.v, s * a.d, s * a.dd}; }
inline Jet operator*(double s, const Jet& a) { return Jet::C(s) * a; }
inline Jet operator+(double s, const Jet& a) { return {a.v + s, a.d, a.dd}; }
inline Jet operator+(const Jet& a, double s) { return s + a; }
inline Jet operator-(double s, const Jet& a) { return {s - a.v, -a.d, -a.dd}; }
inline Jet operator-(const Jet& a, double s) { return {a.v - s, a.d, a.dd}; }

// Chain rule for f(a) given f, f', f'' at a.v.
inline Jet compose(const Jet& a, Jet::C f, Jet::C f1, Jet::C f2) {
  return {f, f1 * a.d, f2 * a.d * a.d + f1 * a.dd};
}

inline Jet inverse(const Jet& a) {
  const Jet::C r = 1.0 / a.v;
  return compose(a, r, -r * r, 2.0 * r * r * r);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }
inline Jet operator/(double s, const Jet& a) { return s * inverse(a); }

inline Jet exp(const Jet& a) {
  const Jet::C e = std::exp(a.v);
  return compose(a, e, e, e);
}
inline Jet sin(const Jet& a) {
  const Jet::C s = std::sin(a.v), c = std::cos(a.v);
  return compose(a, s, c, -s);
}
inline Jet cos(const Jet& a) {
  const Jet::C s = std::sin(a.v), c = std::cos(a.v);
  return compose(a, c, -s, -c);
}
inline Jet log(const Jet& a) {
  const Jet::C r = 1.0 / a.v;
  return compose(a, std::log(a.v), r, -r * r);
}
inline Jet pow(const Jet& a, double p) {
  const Jet::C f = std::pow(a.v, p);
  return compose(a, f, p * f / a.v, p * (p - 1.0) * f / (a.v * a.v));
}
// e^{i a}
inline Jet expi(const Jet& a) { return exp(Jet::C(0.0, 1.0) * a); }

}  // namespace rabi
