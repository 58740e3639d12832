#include <cmath>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "rabi/errors.hpp"
#include "rabi/io.hpp"
#include "rabi/model.hpp"

using namespace rabi;
using doctest::Approx;

TEST_CASE("rabi parameters map onto the Jacobi model") {
  SUBCASE("vanishing level separation gives rho = 0") {
    const auto rj = rabi_to_jacobi({1.0, 1e-300, 1.0, 1.0}, Branch::plus);
    CHECK(rj.spec.offdiag().a1 == 1.0);
    CHECK(std::abs(rj.spec.rho()) < 1e-299);
    CHECK(rj.map(3.0) == Approx(2.5));
  }
  SUBCASE("minus branch flips rho") {
    const auto rj = rabi_to_jacobi({1.0, 1.0, 1.0, 1.0}, Branch::minus);
    CHECK(rj.spec.offdiag().a1 == 1.0);
    CHECK(rj.spec.rho() == Approx(-0.5));
  }
  SUBCASE("omega = 2") {
    const auto rj = rabi_to_jacobi({2.0, 1.0, 1.0, 1.0}, Branch::plus);
    CHECK(rj.spec.offdiag().a1 == 0.5);
    CHECK(rj.spec.rho() == Approx(0.25));
    CHECK(rj.map.shift == -1.0);
    CHECK(rj.map.scale == 2.0);
  }
  SUBCASE("branches differ only in the sign of rho") {
    const RabiParams p{1.3, 0.7, 0.4, 1.1};
    const auto a = rabi_to_jacobi(p, Branch::plus);
    const auto b = rabi_to_jacobi(p, Branch::minus);
    for (long k = 1; k <= 10; ++k) {
      CHECK(a.spec.a(k) == b.spec.a(k));
      CHECK(a.spec.v(k) == -b.spec.v(k));
    }
    CHECK(a.map.shift == b.map.shift);
  }
  SUBCASE("non-positive parameters are rejected") {
    CHECK_THROWS_AS(rabi_to_jacobi({0.0, 1.0, 1.0, 1.0}, Branch::plus), DomainError);
    CHECK_THROWS_AS(rabi_to_jacobi({1.0, -1.0, 1.0, 1.0}, Branch::plus), DomainError);
    CHECK_THROWS_AS(rabi_to_jacobi({1.0, 1.0, 1.0, 0.0}, Branch::plus), DomainError);
  }
}

TEST_CASE("entries") {
  const auto h0 = ModelSpec::h0(1.0, 0.5);
  const auto e = entries(h0, 2, 2);
  CHECK(e[0].d == 2.5);
  CHECK(e[0].a == Approx(std::sqrt(2.0)).epsilon(1e-15));

  const auto h12 = ModelSpec::h12({2.0, 0.3, 0.0}, PeriodicPotential::from_values({1.0, 0.0, -1.0}));
  const auto f = entries(h12, 3, 3);
  CHECK(f[0].d == 2.0);
  CHECK(f[0].a == Approx(2.0 * std::pow(3.0, 0.3)).epsilon(1e-15));
  CHECK(h12.alpha0() == Approx(0.0).epsilon(1e-15));

  CHECK(h0.a(0) == 0.0);
  CHECK(h12.a(0) == 0.0);
  CHECK_THROWS_AS(entries(h0, 0, 3), DomainError);

  for (long k = 1; k <= 30; ++k) {
    CHECK(h12.d(k + 3) - h12.d(k) == Approx(3.0).epsilon(1e-15));
    CHECK(h0.d(k + 2) - h0.d(k) == 2.0);
  }
}

TEST_CASE("fourier decomposition") {
  SUBCASE("N = 2 alternating sequence") {
    const auto p = fourier_decompose(std::vector<double>{-0.3, 0.3});
    CHECK(std::abs(p.alpha0()) < 1e-15);
    CHECK(p.alpha(1) == Approx(0.3).epsilon(1e-14));
    CHECK(p.rho_N() == Approx(0.3).epsilon(1e-14));
  }
  SUBCASE("constant sequence") {
    const auto p = fourier_decompose(std::vector<double>{0.7, 0.7, 0.7});
    CHECK(p.alpha0() == Approx(0.7).epsilon(1e-15));
    CHECK(std::abs(p.alpha(1)) < 1e-15);
    CHECK(std::abs(p.alpha_tilde(1)) < 1e-15);
    CHECK(p.rho_N() < 1e-15);
  }
  SUBCASE("N = 4 sine") {
    std::vector<double> v;
    for (int k = 1; k <= 4; ++k) v.push_back(std::sin(std::numbers::pi * k / 2.0));
    const auto p = fourier_decompose(v);
    CHECK(p.alpha_tilde(1) == Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(p.alpha(1)) < 1e-14);
    CHECK(std::abs(p.alpha(2)) < 1e-14);
    CHECK(std::abs(p.alpha0()) < 1e-14);
  }
  SUBCASE("reconstruction and rho_N on assorted vectors") {
    const std::vector<std::vector<double>> cases{
        {0.1, -0.2, 0.05}, {1.0, 2.0, 3.0, 4.0, 5.0}, {0.3, -0.1, 0.2, 0.0, -0.4, 0.25}, {2.0, -1.0}};
    for (const auto& v : cases) {
      const auto p = fourier_decompose(v);
      double mean = 0.0, rho = 0.0;
      for (double x : v) mean += x / static_cast<double>(v.size());
      for (double x : v) rho = std::max(rho, std::abs(x - mean));
      CHECK(p.rho_N() == Approx(rho).epsilon(1e-14));
      for (long k = 1; k <= static_cast<long>(v.size()); ++k) {
        CHECK(std::abs(p.reconstruct(k) - v[static_cast<std::size_t>(k - 1)]) < 1e-12);
      }
    }
  }
  SUBCASE("smallness condition") {
    CHECK(fourier_decompose(std::vector<double>{-0.49, 0.49}).smallness_holds());
    CHECK_FALSE(fourier_decompose(std::vector<double>{-0.5, 0.5}).smallness_holds());
    const double lim3 = 1.0 / (std::numbers::pi * std::sqrt(3.0));
    CHECK(fourier_decompose(std::vector<double>{0.0, 0.0, 0.0}).smallness_limit() == Approx(lim3));
  }
  CHECK_THROWS_AS(fourier_decompose(std::vector<double>{1.0}), DomainError);
}

TEST_CASE("off-diagonal profile") {
  const OffDiagonalProfile a{1.5, 0.3, 0.2};
  CHECK(a(8.0) == Approx(1.5 * std::pow(8.0, 0.3) + 0.2 * std::pow(8.0, -0.7)).epsilon(1e-15));
  CHECK(a(0.0) == 0.0);
  CHECK(a.delta(100.0) == Approx(a(101.0) - a(100.0)).epsilon(1e-12));
  CHECK(a.delta2(100.0) == Approx(a(102.0) - 2.0 * a(101.0) + a(100.0)).epsilon(1e-6));
  const OffDiagonalProfile h{1.0, 0.5, 0.0};
  // a(x+1) - a(x) for large x, where the naive difference loses all digits.
  const double x = 1e15;
  CHECK(h.delta(x) == Approx(0.5 / std::sqrt(x)).epsilon(1e-10));
  CHECK_THROWS_AS(OffDiagonalProfile({1.0, 0.6, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS(OffDiagonalProfile({-1.0, 0.5, 0.0}).validate(), DomainError);

  for (const auto& prof : {OffDiagonalProfile{1.0, 0.5, 0.0}, OffDiagonalProfile{2.0, 0.3, 0.5},
                           OffDiagonalProfile{0.7, 0.1, -0.3}}) {
    const auto c = certify_profile(prof, 5000);
    CHECK(c.holds);
    CHECK(c.c > 0.0);
    CHECK(c.C >= c.c);
    CHECK(c.k0 >= 1);
  }
}

TEST_CASE("model specs") {
  SUBCASE("tiny coupling is treated as zero") {
    const auto s = ModelSpec::h0(1e-300, 0.3);
    CHECK(s.offdiag().is_zero());
    CHECK(s.a(5) == 0.0);
  }
  SUBCASE("H0 checks its shape") {
    CHECK_THROWS_AS(ModelSpec(Mode::H0, {1.0, 0.3, 0.0}, PeriodicPotential::from_values({-0.1, 0.1})),
                    DomainError);
    CHECK_THROWS_AS(ModelSpec(Mode::H0, {1.0, 0.5, 0.0}, PeriodicPotential::from_values({0.1, 0.2, 0.3})),
                    DomainError);
  }
  SUBCASE("centering removes the mean") {
    const auto s = ModelSpec::h12({1.0, 0.5, 0.0}, PeriodicPotential::from_values({1.0, 2.0, 3.0}));
    const auto c = s.centered();
    CHECK(s.alpha0() == Approx(2.0));
    CHECK(std::abs(c.alpha0()) < 1e-15);
    for (long k = 1; k <= 6; ++k) CHECK(c.v(k) == Approx(s.v(k) - 2.0));
  }
}

TEST_CASE("model descriptors") {
  const auto h0 = model_from_json(nlohmann::json::parse(R"({"mode":"H0","a1":1,"rho":0.25})"));
  CHECK(h0.spec.mode() == Mode::H0);
  CHECK(h0.spec.rho() == Approx(0.25));
  CHECK_FALSE(h0.rabi.has_value());

  const auto h12 = model_from_json(
      nlohmann::json::parse(R"({"mode":"H12","a1":2,"gamma":0.3,"N":3,"v":[1,0,-1]})"));
  CHECK(h12.spec.period() == 3);
  CHECK(h12.spec.gamma() == 0.3);

  const auto rabi = model_from_json(
      nlohmann::json::parse(R"({"rabi":{"omega":2,"E":1,"g":1,"hbar":1},"sign":"-"})"));
  REQUIRE(rabi.rabi.has_value());
  CHECK(rabi.branch == Branch::minus);
  CHECK(rabi.spec.rho() == Approx(-0.25));
  CHECK(rabi.map(0.0) == Approx(-1.0));

  const auto back = model_from_json(model_to_json(h12));
  for (long k = 1; k <= 6; ++k) {
    CHECK(back.spec.d(k) == h12.spec.d(k));
    CHECK(back.spec.a(k) == h12.spec.a(k));
  }

  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"mode":"H7"})")), DomainError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"mode":"H12","a1":"x","v":[1,2]})")),
                  DomainError);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
