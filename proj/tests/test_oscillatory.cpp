#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "rabi/asymptotics.hpp"
#include "rabi/errors.hpp"
#include "rabi/oscillatory.hpp"

using namespace rabi;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

PeriodicSymbol constant_one() {
  return {"one", [](const Jet&) { return Jet::constant(1.0); }};
}

}  // namespace

TEST_CASE("periodic integral against Bessel functions") {
  const auto one = constant_one();
  for (double mu : {0.5, 5.0, 10.0, 100.0, 1000.0, 10000.0}) {
    const double j0 = oracle::bessel_j(0, mu)[0];
    for (double eta0 : {0.0, 1.3, -2.0}) {
      const auto I = integral_I(one, mu, eta0);
      CHECK(std::abs(I.real() - j0) < 1e-10);
      CHECK(std::abs(I.imag()) < 1e-10);
    }
  }
  const PeriodicSymbol e1{"exp_i1", [](const Jet& x) { return expi(x); }};
  const auto I = integral_I(e1, 5.0, 0.0);
  CHECK(std::abs(I - cplx(0.0, oracle::bessel_j(1, 5.0)[1])) < 1e-12);

  const PeriodicSymbol mixed{"mixed", [](const Jet& x) { return 0.3 + cos(x) + 2.0 * sin(3.0 * x); }};
  CHECK(std::abs(integral_I(mixed, 0.0, 0.4) - cplx(0.3, 0.0)) < 1e-14);
}

TEST_CASE("rotation invariance") {
  for (const auto& b : stationary_phase_family()) {
    for (double c : {0.4, -1.7}) {
      const auto I = integral_I(b, 37.0, 0.9);
      const auto R = integral_I(b.rotated(c), 37.0, 0.9 + c);
      CHECK(std::abs(I - R) < 1e-12);
    }
  }
}

TEST_CASE("stationary phase") {
  const auto one = constant_one();
  const auto sp = stationary_phase(one, 100.0, 0.0);
  CHECK(std::abs(sp.main_term - cplx(2.0 * std::cos(100.0 - kPi / 4.0) / std::sqrt(200.0 * kPi), 0.0)) < 1e-15);
  CHECK(std::abs(integral_I(one, 100.0, 0.0) - sp.main_term) <= sp.remainder_bound);

  const double eta0 = 0.8;
  const PeriodicSymbol odd{"odd", [eta0](const Jet& x) { return sin(x - eta0); }};
  CHECK(std::abs(stationary_phase(odd, 50.0, eta0).main_term) < 1e-15);

  CHECK_THROWS_AS(stationary_phase(one, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(stationary_phase(one, -3.0, 0.0), DomainError);

  const auto family = stationary_phase_family();
  CHECK(family.size() == 20);
  for (const auto& b : family) {
    CHECK(b.periodicity_defect() <= 1e-12);
    double worst = 0.0;
    for (double mu : {10.0, 100.0, 1000.0, 10000.0}) {
      const double r = mu * std::abs(integral_I(b, mu, 0.3) - stationary_phase(b, mu, 0.3).main_term) / b.c2_norm();
      worst = std::max(worst, r);
    }
    CHECK_MESSAGE(worst <= kStationaryPhaseC0, b.name);
  }
}

TEST_CASE("oscillatory approximation of g_n") {
  SUBCASE("rho = 0") {
    CHECK(g_frak(ModelSpec::h0(1.0, 0.0), 400, 400) == 0.0);
    CHECK(g_frak_generalN(ModelSpec::h0(1.0, 0.0), 400) == 0.0);
  }
  SUBCASE("k = n is an I value") {
    const auto spec = ModelSpec::h0(1.0, 0.25);
    const long n = 301;
    const double a = std::sqrt(301.0);
    const double da = std::sqrt(302.0) - a;
    const PeriodicSymbol b{"b_n", [a, da](const Jet& x) { return expi(-4.0 * a * da * sin(2.0 * x)); }};
    const double expect = -0.25 * integral_I(b, 4.0 * a, -kPi / 2.0).real();
    CHECK(g_frak(spec, n, n) == Approx(expect).epsilon(1e-12));
  }
  SUBCASE("validity window") {
    const auto spec = ModelSpec::h0(1.0, 0.25);
    CHECK_NOTHROW(g_frak(spec, 400, 420));
    CHECK_THROWS_AS(g_frak(spec, 400, 421), DomainError);
    CHECK_THROWS_AS(g_frak(ModelSpec::h12({1.0, 0.5, 0.0}, PeriodicPotential::from_values({0.1, 0.0, -0.1})), 400, 400),
                    DomainError);
  }
  SUBCASE("general N reduces to the N = 2 closed form") {
    const auto spec = ModelSpec::h12({1.0, 0.5, 0.0}, PeriodicPotential::from_values({-0.25, 0.25}));
    for (long n : {100L, 101L, 2000L}) {
      const double a = std::sqrt(static_cast<double>(n));
      const double expect = (n % 2 == 0 ? 1.0 : -1.0) * 0.25 * std::cos(4.0 * a - kPi / 4.0) / std::sqrt(2.0 * kPi * a);
      CHECK(std::abs(g_frak_generalN(spec, n) - expect) < 1e-14);
    }
  }
  SUBCASE("general N equals r(n)") {
    std::vector<double> v;
    for (int k = 1; k <= 3; ++k) v.push_back(std::cos(2.0 * kPi * k / 3.0));
    const auto spec = ModelSpec::h12({1.0, 0.5, 0.0}, PeriodicPotential::from_values(v));
    CHECK(std::abs(g_frak_generalN(spec, 729) - r_of_n(spec, 729.0)) < 1e-13);
    const auto mixed = ModelSpec::h12({0.9, 0.35, 0.2}, PeriodicPotential::from_values({0.02, -0.03, 0.05, 0.01, -0.04}));
    for (long n : {200L, 999L}) CHECK(std::abs(g_frak_generalN(mixed, n) - r_of_n(mixed, static_cast<double>(n))) < 1e-13);
  }
}

TEST_CASE("van der Corput integrals") {
  SUBCASE("zero symbol") {
    CorputIntegrand ci{[](const Jet&) { return Jet::constant(0.0); }, -1.0, 2.0, 0.5, 100.0};
    CHECK(std::abs(integral_J(ci)) == 0.0);
  }
  SUBCASE("bounded after sqrt(mu) scaling") {
    double lo = 1e300, hi = 0.0;
    for (double mu : {10.0, 100.0, 1000.0, 10000.0}) {
      CorputIntegrand ci{[](const Jet&) { return Jet::constant(1.0); }, 0.0, kPi, 1.0, mu};
      const double s = std::abs(integral_J(ci)) * std::sqrt(mu);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    CHECK(hi < 5.0);
    CHECK(lo > 0.0);
  }
  SUBCASE("graded and uniform meshes agree at the singularity") {
    CorputIntegrand ci{[](const Jet&) { return Jet::constant(1.0); }, 0.0, kPi, 0.0, 50.0};
    const auto g = integral_J(ci, 1e-11, Mesh::adaptive_graded);
    const auto u = integral_J(ci, 1e-11, Mesh::uniform_substituted);
    CHECK(std::isfinite(g.real()));
    CHECK(std::abs(g - u) < 1e-8);
  }
  SUBCASE("additivity") {
    const auto b = [](const Jet& t) { return cos(2.0 * t) + 0.5; };
    CorputIntegrand whole{b, -2.0, 2.5, 0.0, 300.0};
    CorputIntegrand left{b, -2.0, 0.7, 0.0, 300.0};
    CorputIntegrand right{b, 0.7, 2.5, 0.0, 300.0};
    CHECK(std::abs(integral_J(whole, 1e-11) - integral_J(left, 1e-11) - integral_J(right, 1e-11)) < 1e-9);
  }
  SUBCASE("M norm") {
    CorputIntegrand c{[](const Jet&) { return Jet::constant(2.0); }, -1.0, 1.0, 0.0, 10.0};
    CHECK(c.M_norm() == Approx(2.0));
    CorputIntegrand s{[](const Jet& t) { return sin(t); }, 0.0, kPi, 0.0, 10.0};
    CHECK(s.M_norm() == Approx(3.0).epsilon(1e-6));
  }
  SUBCASE("validation") {
    CorputIntegrand bad{[](const Jet&) { return Jet::constant(1.0); }, 1.0, 0.0, 0.0, 10.0};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = {[](const Jet&) { return Jet::constant(1.0); }, 0.0, 1.0, -1.0, 10.0};
    CHECK_THROWS_AS(bad.validate(), DomainError);
  }
  SUBCASE("random draws are deterministic and in range") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto a = random_corput_integrand(seed);
      const auto b = random_corput_integrand(seed);
      CHECK(a.mu == b.mu);
      CHECK(a.t1 == b.t1);
      CHECK(a.mu >= 10.0);
      CHECK(a.mu <= 1e4);
      CHECK(a.zeta >= 0.0);
      CHECK(a.zeta <= 3.0);
      CHECK(a.t1 >= -kPi);
      CHECK(a.t2 <= kPi);
      CHECK(std::abs(integral_J(a)) <= corput_bound(a));
    }
  }
}
