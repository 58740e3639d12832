#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace rabi {

// Square matrix with entries confined to |i - j| <= bandwidth.
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(std::size_t n, std::size_t bandwidth);

  static BandMatrix identity(std::size_t n);
  // Skew-symmetric tridiagonal matrix with A(i, i+1) = upper[i], A(i+1, i) = -upper[i].
  static BandMatrix skew_tridiagonal(const std::vector<double>& upper);

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return b_; }

  double operator()(std::size_t i, std::size_t j) const;
  // Requires |i - j| <= bandwidth().
  double& at(std::size_t i, std::size_t j);

  BandMatrix operator*(const BandMatrix& rhs) const;
  BandMatrix& operator*=(double s);
  BandMatrix operator+(const BandMatrix& rhs) const;
  BandMatrix transpose() const;

  // Shrinks the bandwidth past outer diagonals whose entries are all below tol.
  void trim(double tol);
  double norm1() const;
  Eigen::MatrixXd to_dense() const;

 private:
  double* row_ptr(std::size_t i) { return data_.data() + i * (2 * b_ + 1); }
  const double* row_ptr(std::size_t i) const { return data_.data() + i * (2 * b_ + 1); }

  std::size_t n_ = 0;
  std::size_t b_ = 0;
  std::vector<double> data_;  // row-major, entry (i, j) at column j - i + b
};

struct ExpmReport {
  int squarings = 0;
  int taylor_degree = 0;
  std::size_t final_bandwidth = 0;
};

// exp(A) by Taylor scaling and squaring; entries below drop_tol are trimmed
// from the band after every squaring.
BandMatrix expm_banded(const BandMatrix& A, double drop_tol = 1e-18,
                       ExpmReport* report = nullptr);

}  // namespace rabi
