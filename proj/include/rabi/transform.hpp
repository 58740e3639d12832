#pragma once

#include <filesystem>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "rabi/banded.hpp"
#include "rabi/eigensolve.hpp"
#include "rabi/model.hpp"

namespace rabi {

// C-infinity step: 1 on |t| <= 1/6, 0 on |t| >= 1/5, built from exp(-1/u).
double theta0(double t);

struct CutoffProfile {
  double operator()(double t) const { return theta0(t); }
  // theta_{tau,n}(s) = theta0((s - n) / tau)
  double scaled(double s, double tau, double n) const { return theta0((s - n) / tau); }
};

// max(15 n^gamma, n/2 + 8), rounded up.
long default_half_width(const ModelSpec& spec, long n);

// Pointwise cut-off sequences for the centred model (alpha0 removed).
double vn_value(const ModelSpec& centered, long n, long k);
double an_value(const ModelSpec& centered, long n, long k);
double ln_value(const ModelSpec& centered, long n, long k);

struct AuxiliaryOptions {
  long n_min = 8;
  // Materialise the dense conjugated potential; g_n alone does not need it.
  bool dense_vtilde = true;
  double drop_tol = 1e-18;
};

// Window [n - W, n + W] on l2(Z). Sequences are indexed locally, i <-> k = first() + i.
// The model is centred before construction; alpha0 records the removed mean.
struct AuxiliaryOperators {
  ModelSpec spec;
  double alpha0 = 0.0;
  long n = 0;
  long W = 0;
  double a_anchor = 0.0;  // a(n)
  double delta_a = 0.0;   // a(n + 1) - a(n)

  std::vector<double> vn, an, ln, gn, ltilde;
  // e^{iB_n} = exp(-A) with A skew, A(k, k+1) = a_n(k); orthogonal.
  BandMatrix conjugator;
  Eigen::MatrixXd vtilde;  // empty unless dense_vtilde

  long first() const { return n - W; }
  long last() const { return n + W; }
  std::size_t size() const { return vn.size(); }
  // Throws WindowError outside the window.
  std::size_t local(long k) const;

  BandMatrix generator() const;
  TridiagonalWindow Jn() const;
  // L_n = diag(l_n) + Vtilde. Requires dense_vtilde.
  Eigen::MatrixXd Ln() const;
};

AuxiliaryOperators build_auxiliary(const ModelSpec& spec, long n, long W = 0,
                                   const CutoffProfile& cutoff = {},
                                   const AuxiliaryOptions& options = {});

// g_n(k); k must sit at distance >= 5 from both window edges.
double gn_diagonal(const AuxiliaryOperators& aux, long k);

using TestFunction = std::function<double(double)>;

std::vector<double> Ln_spectrum(const AuxiliaryOperators& aux);

struct TraceReport {
  double value = 0.0;
  // Outside the window L_n and the diagonal comparison operator both equal
  // the index operator, so their contributions cancel exactly.
  double tail_bound = 0.0;
  // Largest |chi| at the diagonal entries of the outermost rows.
  double leakage = 0.0;
  bool leakage_warning = false;
};

TraceReport trace_functional(const AuxiliaryOperators& aux, const TestFunction& chi,
                             const std::vector<double>& Ln_eigenvalues,
                             double leakage_tol = 1e-8);
TraceReport trace_functional(const AuxiliaryOperators& aux, const TestFunction& chi,
                             double leakage_tol = 1e-8);

// Spectral norm of e^{iB_n} J_n e^{-iB_n} - L_n on rows |k - n| <= radius.
double conjugation_defect(const AuxiliaryOperators& aux, long radius);

// <stem>.f64 holds little-endian doubles; <stem>.json holds metadata plus "count".
void write_diagonal_fixture(const std::filesystem::path& stem, const std::vector<double>& values,
                            nlohmann::json meta);
std::pair<std::vector<double>, nlohmann::json> read_diagonal_fixture(
    const std::filesystem::path& stem);

}  // namespace rabi
