#include "rabi/transform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "rabi/errors.hpp"
#include "rabi/io.hpp"

namespace rabi {

double theta0(double t) {
  const double s = std::abs(t);
  if (s <= 1.0 / 6.0) return 1.0;
  if (s >= 1.0 / 5.0) return 0.0;
  const double x = (s - 1.0 / 6.0) * 30.0;
  auto f = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  const double fx = f(x);
  const double fy = f(1.0 - x);
  return fy / (fx + fy);
}

long default_half_width(const ModelSpec& spec, long n) {
  const double w = std::max(15.0 * std::pow(static_cast<double>(n), spec.gamma()),
                            0.5 * static_cast<double>(n) + 8.0);
  return static_cast<long>(std::ceil(w));
}

double vn_value(const ModelSpec& centered, long n, long k) {
  const double th = theta0(static_cast<double>(k - n) / static_cast<double>(n));
  return th == 0.0 ? 0.0 : centered.v(k) * th * th;
}

double an_value(const ModelSpec& centered, long n, long k) {
  const double th = theta0(static_cast<double>(k - n) / (2.0 * static_cast<double>(n)));
  if (th == 0.0) return 0.0;
  const auto& prof = centered.offdiag();
  const double x = static_cast<double>(n);
  return (prof(x) + static_cast<double>(k - n) * prof.delta(x)) * th;
}

double ln_value(const ModelSpec& centered, long n, long k) {
  const double am = an_value(centered, n, k - 1);
  const double a0 = an_value(centered, n, k);
  return static_cast<double>(k) + (am - a0) * (am + a0);
}

std::size_t AuxiliaryOperators::local(long k) const {
  if (k < first() || k > last()) throw WindowError("index outside the auxiliary window");
  return static_cast<std::size_t>(k - first());
}

BandMatrix AuxiliaryOperators::generator() const {
  return BandMatrix::skew_tridiagonal(std::vector<double>(an.begin(), an.end() - 1));
}

TridiagonalWindow AuxiliaryOperators::Jn() const {
  TridiagonalWindow w;
  w.offset = first();
  w.diag.resize(size());
  for (std::size_t i = 0; i < size(); ++i) {
    w.diag[i] = static_cast<double>(first() + static_cast<long>(i)) + vn[i];
  }
  w.offdiag.assign(an.begin(), an.end() - 1);
  w.truncation_margin = W;
  return w;
}

Eigen::MatrixXd AuxiliaryOperators::Ln() const {
  if (vtilde.rows() != static_cast<long>(size())) {
    throw DependencyError("L_n requested from operators built without the dense conjugated potential");
  }
  Eigen::MatrixXd L = vtilde;
  for (std::size_t i = 0; i < size(); ++i) L(static_cast<long>(i), static_cast<long>(i)) += ln[i];
  return L;
}

AuxiliaryOperators build_auxiliary(const ModelSpec& spec, long n, long W,
                                   const CutoffProfile& cutoff, const AuxiliaryOptions& options) {
  if (n < options.n_min) throw DomainError("auxiliary operators need n >= n_min");
  if (W == 0) W = default_half_width(spec, n);
  // supp a_n lies in |k - n| < 2n/5; one extra row keeps the conjugation untruncated.
  const long needed = static_cast<long>(std::floor(0.4 * static_cast<double>(n))) + 2;
  if (W < needed) {
    throw DomainError("window half-width " + std::to_string(W) + " does not contain supp(a_n); need >= " +
                      std::to_string(needed));
  }
  AuxiliaryOperators aux;
  aux.spec = spec.centered();
  aux.alpha0 = spec.alpha0();
  aux.n = n;
  aux.W = W;
  const auto& prof = aux.spec.offdiag();
  aux.a_anchor = prof(static_cast<double>(n));
  aux.delta_a = prof.delta(static_cast<double>(n));

  const std::size_t size = static_cast<std::size_t>(2 * W + 1);
  aux.vn.resize(size);
  aux.an.resize(size);
  aux.ln.resize(size);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < size; ++i) {
    const long k = aux.first() + static_cast<long>(i);
    const double th_v = cutoff.scaled(static_cast<double>(k), nd, nd);
    const double th_a = cutoff.scaled(static_cast<double>(k), 2.0 * nd, nd);
    aux.vn[i] = th_v == 0.0 ? 0.0 : aux.spec.v(k) * th_v * th_v;
    aux.an[i] = th_a == 0.0 ? 0.0 : (aux.a_anchor + static_cast<double>(k - n) * aux.delta_a) * th_a;
  }
  for (std::size_t i = 0; i < size; ++i) {
    const long k = aux.first() + static_cast<long>(i);
    const double am = i == 0 ? 0.0 : aux.an[i - 1];
    aux.ln[i] = static_cast<double>(k) + (am - aux.an[i]) * (am + aux.an[i]);
  }

  BandMatrix A = aux.generator();
  A *= -1.0;
  aux.conjugator = expm_banded(A, options.drop_tol);
  const BandMatrix& Q = aux.conjugator;

  aux.gn.assign(size, 0.0);
  const std::size_t b = Q.bandwidth();
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t lo = i > b ? i - b : 0;
    const std::size_t hi = std::min(size - 1, i + b);
    double g = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) {
      const double q = Q(i, j);
      g += q * q * aux.vn[j];
    }
    aux.gn[i] = g;
  }
  aux.ltilde.resize(size);
  for (std::size_t i = 0; i < size; ++i) aux.ltilde[i] = aux.ln[i] + aux.gn[i];

  if (options.dense_vtilde) {
    BandMatrix QD = Q;
    for (std::size_t i = 0; i < size; ++i) {
      const std::size_t lo = i > b ? i - b : 0;
      const std::size_t hi = std::min(size - 1, i + b);
      for (std::size_t j = lo; j <= hi; ++j) QD.at(i, j) *= aux.vn[j];
    }
    Eigen::MatrixXd V = (QD * Q.transpose()).to_dense();
    aux.vtilde = 0.5 * (V + V.transpose());
  }
  return aux;
}

double gn_diagonal(const AuxiliaryOperators& aux, long k) {
  if (k - aux.first() < 5 || aux.last() - k < 5) {
    throw WindowError("g_n(k) requested within 5 rows of the window edge");
  }
  return aux.gn[aux.local(k)];
}

std::vector<double> Ln_spectrum(const AuxiliaryOperators& aux) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(aux.Ln(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw AccuracyError("dense eigensolver did not converge on L_n");
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

TraceReport trace_functional(const AuxiliaryOperators& aux, const TestFunction& chi,
                             const std::vector<double>& Ln_eigenvalues, double leakage_tol) {
  if (Ln_eigenvalues.size() != aux.size()) {
    throw DomainError("trace functional: spectrum size does not match the window");
  }
  const double c = aux.ln[aux.local(aux.n)];
  std::vector<double> terms;
  terms.reserve(2 * aux.size());
  for (double lam : Ln_eigenvalues) terms.push_back(chi(lam - c));
  for (double lt : aux.ltilde) terms.push_back(-chi(lt - c));
  // Pairwise-sorted summation keeps the cancellation between the two sums clean.
  std::sort(terms.begin(), terms.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
  TraceReport r;
  for (double t : terms) r.value += t;
  const std::size_t edge = std::min<std::size_t>(3, aux.size());
  for (std::size_t i = 0; i < edge; ++i) {
    r.leakage = std::max(r.leakage, std::abs(chi(aux.ltilde[i] - c)));
    r.leakage = std::max(r.leakage, std::abs(chi(aux.ltilde[aux.size() - 1 - i] - c)));
  }
  r.leakage_warning = r.leakage > leakage_tol;
  return r;
}

TraceReport trace_functional(const AuxiliaryOperators& aux, const TestFunction& chi,
                             double leakage_tol) {
  return trace_functional(aux, chi, Ln_spectrum(aux), leakage_tol);
}

double conjugation_defect(const AuxiliaryOperators& aux, long radius) {
  const BandMatrix& Q = aux.conjugator;
  const std::size_t size = aux.size();
  BandMatrix J(size, 1);
  for (std::size_t i = 0; i < size; ++i) {
    J.at(i, i) = static_cast<double>(aux.first() + static_cast<long>(i)) + aux.vn[i];
    if (i + 1 < size) {
      J.at(i, i + 1) = aux.an[i];
      J.at(i + 1, i) = aux.an[i];
    }
  }
  const Eigen::MatrixXd C = (Q * J * Q.transpose()).to_dense();
  const long lo = static_cast<long>(aux.local(std::max(aux.first(), aux.n - radius)));
  const long hi = static_cast<long>(aux.local(std::min(aux.last(), aux.n + radius)));
  const long m = hi - lo + 1;
  Eigen::MatrixXd D = C.block(lo, lo, m, m) - aux.Ln().block(lo, lo, m, m);
  D = 0.5 * (D + D.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* ext) {
  return std::filesystem::path(stem.string() + ext);
}

}  // namespace

void write_diagonal_fixture(const std::filesystem::path& stem, const std::vector<double>& values,
                            nlohmann::json meta) {
  std::ofstream out(with_suffix(stem, ".f64"), std::ios::binary);
  if (!out) throw DomainError("cannot open fixture file " + stem.string());
  for (double x : values) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    unsigned char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  meta["count"] = values.size();
  meta["dtype"] = "f64";
  meta["endian"] = "little";
  write_json(with_suffix(stem, ".json"), meta);
}

std::pair<std::vector<double>, nlohmann::json> read_diagonal_fixture(
    const std::filesystem::path& stem) {
  nlohmann::json meta = read_json(with_suffix(stem, ".json"));
  const auto count = meta.at("count").get<std::size_t>();
  std::ifstream in(with_suffix(stem, ".f64"), std::ios::binary);
  if (!in) throw DomainError("cannot open fixture file " + stem.string());
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
      throw DomainError("fixture " + stem.string() + " is shorter than its sidecar count");
    }
    std::uint64_t bits;
    std::memcpy(&bits, bytes, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    values[i] = std::bit_cast<double>(bits);
  }
  return {std::move(values), std::move(meta)};
}

}  // namespace rabi
