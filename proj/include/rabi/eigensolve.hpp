#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rabi/model.hpp"

namespace rabi {

// Finite symmetric tridiagonal section. Row i carries global index offset + i.
struct TridiagonalWindow {
  long offset = 1;
  std::vector<double> diag;
  std::vector<double> offdiag;  // offdiag[i] couples rows i and i + 1
  long truncation_margin = 0;

  std::size_t size() const { return diag.size(); }
  // Throws DomainError on inconsistent lengths, an empty window or non-finite entries.
  void validate() const;
  // Gershgorin enclosure of the spectrum.
  std::pair<double, double> gershgorin() const;
};

// Leading M x M section of J.
TridiagonalWindow leading_section(const ModelSpec& spec, long M);

// Number of eigenvalues strictly below x.
long sturm_count(const TridiagonalWindow& w, double x);

// j-th smallest eigenvalue, 1-based, to absolute tolerance tol.
double eigenvalue_by_index(const TridiagonalWindow& w, std::size_t j, double tol = 1e-10);

// Eigenvalues j_lo..j_hi (1-based, inclusive). Independent indices run on `jobs` threads.
std::vector<double> eigenvalues_by_index(const TridiagonalWindow& w, std::size_t j_lo,
                                         std::size_t j_hi, double tol = 1e-10,
                                         unsigned jobs = 1);

enum class Labeling { nondecreasing_count, window_anchored };

struct SpectrumSlice {
  long n_lo = 1;
  long n_hi = 0;
  std::vector<double> lambda;
  Labeling labeling = Labeling::nondecreasing_count;
  long truncation_size = 0;
  double est_truncation_error = 0.0;

  double at(long n) const;
  std::vector<long> indices() const;
};

struct TruncationPolicy {
  enum class Kind { doubling, fixed };
  Kind kind = Kind::doubling;
  long fixed_size = 0;
  // Stop doubling once the largest shift of a requested eigenvalue is below this.
  double doubling_tol = 1e-8;
  int max_doublings = 6;
  double bisection_tol = 1e-10;
  unsigned jobs = 1;

  // "double" or "fixed:M".
  static TruncationPolicy parse(const std::string& text);
};

SpectrumSlice spectrum_of_J(const ModelSpec& spec, long n_lo, long n_hi,
                            const TruncationPolicy& policy = {});

// Eigenvalues of a two-sided window labelled so that `anchor` is the unique
// eigenvalue in (center - 1/2, center + 1/2]; returns labels anchor + j_lo .. anchor + j_hi.
SpectrumSlice spectrum_of_window_operator(const TridiagonalWindow& op, long anchor,
                                          double center, long j_lo, long j_hi,
                                          double tol = 1e-10);

}  // namespace rabi
