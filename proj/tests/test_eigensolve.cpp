#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rabi/eigensolve.hpp"
#include "rabi/errors.hpp"
#include "rabi/transform.hpp"

using namespace rabi;
using doctest::Approx;

namespace {

TridiagonalWindow make(std::vector<double> d, std::vector<double> e) {
  TridiagonalWindow w;
  w.diag = std::move(d);
  w.offdiag = std::move(e);
  return w;
}

}  // namespace

TEST_CASE("sturm count") {
  CHECK(sturm_count(make({0.0, 0.0}, {1.0}), 0.0) == 1);
  CHECK(sturm_count(make({1.0, 2.0, 3.0}, {0.0, 0.0}), 2.5) == 2);
  // Strictly below: an eigenvalue at x is not counted.
  CHECK(sturm_count(make({1.0, 2.0, 3.0}, {0.0, 0.0}), 2.0) == 1);
  CHECK_THROWS_AS(sturm_count(make({1.0}, {}), std::nan("")), DomainError);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = oracle::random_tridiagonal(rng, 8);
    const auto ev = oracle::eigenvalues(w);
    const double x = 0.5 * (ev[3] + ev[4]);
    CHECK(sturm_count(w, x) == 4);
    long prev = 0;
    for (double y = -20.0; y <= 20.0; y += 0.25) {
      const long c = sturm_count(w, y);
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("eigenvalue by index") {
  CHECK(eigenvalue_by_index(make({0.0, 0.0}, {1.0}), 2) == Approx(1.0).epsilon(1e-10));
  CHECK(eigenvalue_by_index(make({5.0}, {}), 1) == Approx(5.0).epsilon(1e-12));
  CHECK_THROWS_AS(eigenvalue_by_index(make({5.0}, {}), 2), IndexError);
  CHECK_THROWS_AS(eigenvalue_by_index(make({5.0}, {}), 0), IndexError);

  SUBCASE("dense oracle on random 50 x 50") {
    std::mt19937_64 rng(3);
    const auto w = oracle::random_tridiagonal(rng, 50);
    const auto ev = oracle::eigenvalues(w);
    const auto mine = eigenvalues_by_index(w, 1, 50);
    for (std::size_t j = 0; j < 50; ++j) CHECK(std::abs(mine[j] - ev[j]) <= 1e-10);
  }
  SUBCASE("dense oracle on 100 random sizes up to 50") {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + rng() % 50;
      const auto w = oracle::random_tridiagonal(rng, n);
      const auto ev = oracle::eigenvalues(w);
      const auto mine = eigenvalues_by_index(w, 1, n, 1e-10, 2);
      for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(mine[j] - ev[j]));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("spectrum of J") {
  SUBCASE("rho = 0 is exactly n - a1^2") {
    const auto s = spectrum_of_J(ModelSpec::h0(1.0, 0.0), 1, 50);
    for (long n = 1; n <= 50; ++n) CHECK(std::abs(s.at(n) - (n - 1.0)) <= std::max(1e-9, s.est_truncation_error));
    CHECK(s.labeling == Labeling::nondecreasing_count);
  }
  SUBCASE("diagonal operator") {
    const auto s = spectrum_of_J(ModelSpec::h0(1e-300, 0.3), 1, 40);
    for (long n = 1; n <= 40; ++n) {
      const double expect = n + (n % 2 == 0 ? 0.3 : -0.3);
      CHECK(std::abs(s.at(n) - expect) <= 1e-9);
    }
  }
  SUBCASE("golden lambda_100 from a 2000 x 2000 dense section") {
    // LAPACK tridiagonal and full dense solvers agree on 99.0067436426983[25-39].
    const auto s = spectrum_of_J(ModelSpec::h0(1.0, 0.25), 100, 100);
    CHECK(std::abs(s.at(100) - 99.006743642698332) <= 1e-9);
  }
  SUBCASE("max over n <= 200 for rho = 0") {
    for (double a1 : {0.5, 1.0, 2.0}) {
      const auto s = spectrum_of_J(ModelSpec::h0(a1, 0.0), 1, 200);
      double worst = 0.0;
      for (long n = 1; n <= 200; ++n) worst = std::max(worst, std::abs(s.at(n) - (n - a1 * a1)));
      CHECK(worst <= 1e-6);
    }
  }
  SUBCASE("doubling is self-consistent") {
    const auto spec = ModelSpec::h0(1.0, 0.25);
    const auto s = spectrum_of_J(spec, 300, 320);
    TruncationPolicy fixed;
    fixed.kind = TruncationPolicy::Kind::fixed;
    fixed.fixed_size = 2 * s.truncation_size;
    const auto t = spectrum_of_J(spec, 300, 320, fixed);
    for (long n = 300; n <= 320; ++n) CHECK(std::abs(s.at(n) - t.at(n)) <= s.est_truncation_error + 2e-10);
    for (long n = 301; n <= 320; ++n) CHECK(s.at(n) >= s.at(n - 1));
  }
  SUBCASE("policy parsing") {
    CHECK(TruncationPolicy::parse("double").kind == TruncationPolicy::Kind::doubling);
    const auto f = TruncationPolicy::parse("fixed:900");
    CHECK(f.kind == TruncationPolicy::Kind::fixed);
    CHECK(f.fixed_size == 900);
    CHECK_THROWS_AS(TruncationPolicy::parse("fixed:x"), DomainError);
    CHECK_THROWS_AS(TruncationPolicy::parse("triple"), DomainError);
  }
  SUBCASE("non-convergence is reported") {
    TruncationPolicy p;
    p.doubling_tol = 1e-30;
    p.max_doublings = 1;
    CHECK_THROWS_AS(spectrum_of_J(ModelSpec::h0(1.0, 0.25), 100, 110, p), TruncationError);
  }
  CHECK_THROWS_AS(spectrum_of_J(ModelSpec::h0(1.0, 0.25), 0, 10), DomainError);
}

TEST_CASE("window-anchored spectrum") {
  SUBCASE("rho = 0: anchored eigenvalue equals l_n(n) up to the conjugation defect") {
    const auto spec = ModelSpec::h0(1.0, 0.0);
    const auto aux = build_auxiliary(spec, 200);
    const double center = aux.ln[aux.local(200)];
    const auto s = spectrum_of_window_operator(aux.Jn(), 200, center, 0, 0);
    CHECK(std::abs(s.at(200) - center) <= std::pow(200.0, 3 * 0.5 - 2));
    CHECK(s.labeling == Labeling::window_anchored);
  }
  SUBCASE("rho = 0.25, n = 400: unique eigenvalue in the anchoring interval") {
    const auto spec = ModelSpec::h0(1.0, 0.25);
    const auto aux = build_auxiliary(spec, 400);
    const auto w = aux.Jn();
    const double c = aux.ln[aux.local(400)];
    CHECK(sturm_count(w, std::nextafter(c + 0.5, 1e300)) - sturm_count(w, std::nextafter(c - 0.5, 1e300)) == 1);
    const auto s = spectrum_of_window_operator(w, 400, c, -3, 3);
    for (long n = 398; n <= 403; ++n) CHECK(s.at(n) > s.at(n - 1));
  }
  SUBCASE("ambiguous anchoring raises a labeling error") {
    const auto w = make({0.0, 0.1, 5.0}, {0.0, 0.0});
    CHECK_THROWS_AS(spectrum_of_window_operator(w, 1, 0.0, 0, 0), LabelingError);
    CHECK_THROWS_AS(spectrum_of_window_operator(w, 1, 2.5, 0, 0), LabelingError);
  }
}
