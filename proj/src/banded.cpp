#include "rabi/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rabi {

BandMatrix::BandMatrix(std::size_t n, std::size_t bandwidth)
    : n_(n), b_(n == 0 ? 0 : std::min(bandwidth, n - 1)), data_(n * (2 * b_ + 1), 0.0) {}

BandMatrix BandMatrix::identity(std::size_t n) {
  BandMatrix I(n, 0);
  for (std::size_t i = 0; i < n; ++i) I.at(i, i) = 1.0;
  return I;
}

BandMatrix BandMatrix::skew_tridiagonal(const std::vector<double>& upper) {
  BandMatrix A(upper.size() + 1, 1);
  for (std::size_t i = 0; i < upper.size(); ++i) {
    A.at(i, i + 1) = upper[i];
    A.at(i + 1, i) = -upper[i];
  }
  return A;
}

double BandMatrix::operator()(std::size_t i, std::size_t j) const {
  const std::size_t d = i > j ? i - j : j - i;
  if (d > b_) return 0.0;
  return row_ptr(i)[j + b_ - i];
}

double& BandMatrix::at(std::size_t i, std::size_t j) {
  const std::size_t d = i > j ? i - j : j - i;
  if (d > b_ || i >= n_ || j >= n_) throw std::out_of_range("band matrix index outside band");
  return row_ptr(i)[j + b_ - i];
}

BandMatrix BandMatrix::operator*(const BandMatrix& rhs) const {
  if (n_ != rhs.n_) throw std::invalid_argument("band matrix size mismatch");
  BandMatrix C(n_, b_ + rhs.b_);
  const long n = static_cast<long>(n_);
  const long ba = static_cast<long>(b_);
  const long bb = static_cast<long>(rhs.b_);
  const long bc = static_cast<long>(C.b_);
  for (long i = 0; i < n; ++i) {
    const double* arow = row_ptr(i);
    double* crow = C.row_ptr(i);
    const long k_lo = std::max(0L, i - ba);
    const long k_hi = std::min(n - 1, i + ba);
    for (long k = k_lo; k <= k_hi; ++k) {
      const double a = arow[k - i + ba];
      if (a == 0.0) continue;
      const double* brow = rhs.row_ptr(k);
      const long j_lo = std::max(0L, k - bb);
      const long j_hi = std::min(n - 1, k + bb);
      double* cdst = crow + (j_lo - i + bc);
      const double* bsrc = brow + (j_lo - k + bb);
      const long len = j_hi - j_lo + 1;
      for (long t = 0; t < len; ++t) cdst[t] += a * bsrc[t];
    }
  }
  return C;
}

BandMatrix& BandMatrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

BandMatrix BandMatrix::operator+(const BandMatrix& rhs) const {
  if (n_ != rhs.n_) throw std::invalid_argument("band matrix size mismatch");
  BandMatrix C(n_, std::max(b_, rhs.b_));
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > C.b_ ? i - C.b_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + C.b_);
    for (std::size_t j = lo; j <= hi; ++j) C.at(i, j) = (*this)(i, j) + rhs(i, j);
  }
  return C;
}

BandMatrix BandMatrix::transpose() const {
  BandMatrix T(n_, b_);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > b_ ? i - b_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + b_);
    for (std::size_t j = lo; j <= hi; ++j) T.at(j, i) = (*this)(i, j);
  }
  return T;
}

void BandMatrix::trim(double tol) {
  std::size_t keep = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = row_ptr(i);
    for (std::size_t c = 0; c < 2 * b_ + 1; ++c) {
      if (std::abs(row[c]) > tol) {
        const std::size_t d = c > b_ ? c - b_ : b_ - c;
        keep = std::max(keep, d);
      }
    }
  }
  if (keep == b_) return;
  BandMatrix T(n_, keep);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > keep ? i - keep : 0;
    const std::size_t hi = std::min(n_ - 1, i + keep);
    for (std::size_t j = lo; j <= hi; ++j) T.at(i, j) = (*this)(i, j);
  }
  *this = std::move(T);
}

double BandMatrix::norm1() const {
  std::vector<double> col(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > b_ ? i - b_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + b_);
    for (std::size_t j = lo; j <= hi; ++j) col[j] += std::abs((*this)(i, j));
  }
  return col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
}

Eigen::MatrixXd BandMatrix::to_dense() const {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<long>(n_), static_cast<long>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > b_ ? i - b_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + b_);
    for (std::size_t j = lo; j <= hi; ++j) {
      D(static_cast<long>(i), static_cast<long>(j)) = (*this)(i, j);
    }
  }
  return D;
}

BandMatrix expm_banded(const BandMatrix& A, double drop_tol, ExpmReport* report) {
  const std::size_t n = A.size();
  // Scale to norm <= theta, then a Taylor polynomial with tail below 1e-18.
  constexpr double theta = 2.0;
  const double norm = A.norm1();
  int s = 0;
  if (norm > theta) s = static_cast<int>(std::ceil(std::log2(norm / theta)));
  BandMatrix X = A;
  X *= std::ldexp(1.0, -s);
  const double xnorm = norm * std::ldexp(1.0, -s);
  int m = 1;
  double term = xnorm;
  while (term > 1e-18 && m < 60) {
    ++m;
    term *= xnorm / m;
  }
  const BandMatrix I = BandMatrix::identity(n);
  BandMatrix T = I;
  for (int k = m; k >= 1; --k) {
    BandMatrix P = X * T;
    P *= 1.0 / k;
    T = I + P;
    T.trim(drop_tol);
  }
  for (int i = 0; i < s; ++i) {
    T = T * T;
    T.trim(drop_tol);
  }
  if (report) {
    report->squarings = s;
    report->taylor_degree = m;
    report->final_bandwidth = T.bandwidth();
  }
  return T;
}

}  // namespace rabi
