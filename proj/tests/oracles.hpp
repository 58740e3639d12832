#pragma once

// Reference computations that share no code with the library.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rabi/eigensolve.hpp"

namespace oracle {

inline Eigen::MatrixXd dense(const rabi::TridiagonalWindow& w) {
  const auto n = static_cast<Eigen::Index>(w.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) A(i, i) = w.diag[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    A(i, i + 1) = A(i + 1, i) = w.offdiag[static_cast<std::size_t>(i)];
  }
  return A;
}

// Ascending eigenvalues by dense symmetric diagonalization.
inline std::vector<double> eigenvalues(const rabi::TridiagonalWindow& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(w), Eigen::EigenvaluesOnly);
  const auto& e = es.eigenvalues();
  return std::vector<double>(e.data(), e.data() + e.size());
}

inline rabi::TridiagonalWindow random_tridiagonal(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  rabi::TridiagonalWindow w;
  w.diag.resize(n);
  w.offdiag.resize(n > 0 ? n - 1 : 0);
  for (auto& x : w.diag) x = u(rng);
  for (auto& x : w.offdiag) x = u(rng);
  return w;
}

// J_0(x), ..., J_order(x) by Miller's backward recurrence, normalized with
// J_0 + 2 sum_k J_2k = 1.
inline std::vector<double> bessel_j(int order, double x) {
  const double ax = std::abs(x);
  const int start = 2 * (static_cast<int>(order + ax + 20.0 * std::cbrt(ax) + 40.0) / 2);
  std::vector<double> J(static_cast<std::size_t>(start + 2), 0.0);
  J[static_cast<std::size_t>(start + 1)] = 0.0;
  J[static_cast<std::size_t>(start)] = 1e-300;
  for (int k = start; k >= 1; --k) {
    J[static_cast<std::size_t>(k - 1)] = 2.0 * k / x * J[static_cast<std::size_t>(k)] - J[static_cast<std::size_t>(k + 1)];
    if (std::abs(J[static_cast<std::size_t>(k - 1)]) > 1e250) {
      for (auto& v : J) v *= 1e-250;
    }
  }
  double norm = J[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * J[static_cast<std::size_t>(k)];
  std::vector<double> out(static_cast<std::size_t>(order + 1));
  for (int k = 0; k <= order; ++k) out[static_cast<std::size_t>(k)] = J[static_cast<std::size_t>(k)] / norm;
  return out;
}

// exp(A) by a plain Taylor series on A / 2^s with ||A / 2^s|| <= 1/8, squared back.
inline Eigen::MatrixXd expm_taylor(const Eigen::MatrixXd& A, int extra_halvings = 0) {
  const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
  int s = extra_halvings;
  while (norm / std::ldexp(1.0, s) > 0.125) ++s;
  const Eigen::MatrixXd X = A / std::ldexp(1.0, s);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k < 40; ++k) {
    term = term * X / k;
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-22) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

}  // namespace oracle
