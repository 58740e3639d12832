#include "rabi/eigensolve.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "rabi/errors.hpp"

namespace rabi {

void TridiagonalWindow::validate() const {
  if (diag.empty()) throw DomainError("tridiagonal window is empty");
  if (offdiag.size() + 1 != diag.size()) {
    throw DomainError("tridiagonal window: offdiag must be one shorter than diag");
  }
  for (double x : diag) {
    if (!std::isfinite(x)) throw DomainError("tridiagonal window: non-finite diagonal entry");
  }
  for (double x : offdiag) {
    if (!std::isfinite(x)) throw DomainError("tridiagonal window: non-finite off-diagonal entry");
  }
}

std::pair<double, double> TridiagonalWindow::gershgorin() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const std::size_t n = diag.size();
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(offdiag[i - 1]);
    if (i + 1 < n) r += std::abs(offdiag[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  return {lo, hi};
}

TridiagonalWindow leading_section(const ModelSpec& spec, long M) {
  if (M < 1) throw DomainError("leading section needs M >= 1");
  TridiagonalWindow w;
  w.offset = 1;
  w.diag.resize(static_cast<std::size_t>(M));
  w.offdiag.resize(static_cast<std::size_t>(M - 1));
  for (long k = 1; k <= M; ++k) {
    w.diag[k - 1] = spec.d(k);
    if (k < M) w.offdiag[k - 1] = spec.a(k);
  }
  return w;
}

namespace {

double pivot_floor(const TridiagonalWindow& w) {
  double emax = 1.0;
  for (double e : w.offdiag) emax = std::max(emax, e * e);
  return DBL_MIN * emax;
}

long count_below(const TridiagonalWindow& w, double x, double pivmin) {
  long count = 0;
  double q = w.diag[0] - x;
  const std::size_t n = w.diag.size();
  for (std::size_t i = 0;; ++i) {
    // A zero pivot is moved up, i.e. x is nudged down, so eigenvalues equal to x are not counted.
    if (q == 0.0) {
      q = pivmin;
    } else if (std::abs(q) < pivmin) {
      q = std::copysign(pivmin, q);
    }
    if (q < 0.0) ++count;
    if (i + 1 == n) break;
    const double e = w.offdiag[i];
    q = w.diag[i + 1] - x - e * e / q;
  }
  return count;
}

double bisect(const TridiagonalWindow& w, std::size_t j, double lo, double hi, double tol,
              double pivmin) {
  const long target = static_cast<long>(j);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(w, mid, pivmin) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

long sturm_count(const TridiagonalWindow& w, double x) {
  if (std::isnan(x)) throw DomainError("sturm_count: x is NaN");
  w.validate();
  return count_below(w, x, pivot_floor(w));
}

double eigenvalue_by_index(const TridiagonalWindow& w, std::size_t j, double tol) {
  w.validate();
  if (j < 1 || j > w.size()) throw IndexError("eigenvalue index out of range");
  if (!(tol > 0.0)) throw DomainError("bisection tolerance must be > 0");
  if (w.size() == 1) return w.diag[0];
  auto [lo, hi] = w.gershgorin();
  lo -= tol;
  hi += tol;
  return bisect(w, j, lo, hi, tol, pivot_floor(w));
}

std::vector<double> eigenvalues_by_index(const TridiagonalWindow& w, std::size_t j_lo,
                                         std::size_t j_hi, double tol, unsigned jobs) {
  w.validate();
  if (j_lo < 1 || j_hi > w.size() || j_lo > j_hi) {
    throw IndexError("eigenvalue index range out of bounds");
  }
  if (!(tol > 0.0)) throw DomainError("bisection tolerance must be > 0");
  auto [glo, ghi] = w.gershgorin();
  glo -= tol;
  ghi += tol;
  const double pivmin = pivot_floor(w);
  const std::size_t count = j_hi - j_lo + 1;
  std::vector<double> out(count);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = bisect(w, j_lo + i, glo, ghi, tol, pivmin);
  };
  const unsigned threads =
      static_cast<unsigned>(std::clamp<std::size_t>(jobs == 0 ? 1 : jobs, 1, count));
  if (threads == 1) {
    work(0, count);
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t b = t * chunk;
    const std::size_t e = std::min(count, b + chunk);
    if (b < e) pool.emplace_back(work, b, e);
  }
  for (auto& th : pool) th.join();
  return out;
}

double SpectrumSlice::at(long n) const {
  if (n < n_lo || n > n_hi) throw IndexError("spectrum slice has no label " + std::to_string(n));
  return lambda[static_cast<std::size_t>(n - n_lo)];
}

std::vector<long> SpectrumSlice::indices() const {
  std::vector<long> out;
  for (long n = n_lo; n <= n_hi; ++n) out.push_back(n);
  return out;
}

TruncationPolicy TruncationPolicy::parse(const std::string& text) {
  TruncationPolicy p;
  if (text == "double") return p;
  if (text.rfind("fixed:", 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string num = text.substr(6);
      p.fixed_size = std::stol(num, &used);
      if (used != num.size()) throw std::invalid_argument(num);
    } catch (const std::exception&) {
      throw DomainError("truncation policy: cannot parse size in '" + text + "'");
    }
    if (p.fixed_size < 1) throw DomainError("truncation policy: fixed size must be >= 1");
    p.kind = Kind::fixed;
    return p;
  }
  throw DomainError("truncation policy must be 'double' or 'fixed:M'");
}

namespace {

std::vector<double> section_eigenvalues(const ModelSpec& spec, long M, long n_lo, long n_hi,
                                        const TruncationPolicy& policy) {
  const auto w = leading_section(spec, M);
  return eigenvalues_by_index(w, static_cast<std::size_t>(n_lo), static_cast<std::size_t>(n_hi),
                              policy.bisection_tol, policy.jobs);
}

double max_shift(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

SpectrumSlice spectrum_of_J(const ModelSpec& spec, long n_lo, long n_hi,
                            const TruncationPolicy& policy) {
  if (n_lo < 1 || n_hi < n_lo) throw DomainError("spectrum_of_J: need 1 <= n_lo <= n_hi");
  SpectrumSlice s;
  s.n_lo = n_lo;
  s.n_hi = n_hi;
  s.labeling = Labeling::nondecreasing_count;

  if (policy.kind == TruncationPolicy::Kind::fixed) {
    const long M = policy.fixed_size;
    if (M < n_hi) throw DomainError("fixed truncation size is smaller than n_hi");
    s.lambda = section_eigenvalues(spec, M, n_lo, n_hi, policy);
    s.truncation_size = M;
    s.est_truncation_error =
        max_shift(s.lambda, section_eigenvalues(spec, 2 * M, n_lo, n_hi, policy));
    return s;
  }

  long M = 2 * n_hi + 200;
  auto prev = section_eigenvalues(spec, M, n_lo, n_hi, policy);
  double shift = std::numeric_limits<double>::infinity();
  for (int d = 0; d < policy.max_doublings; ++d) {
    M *= 2;
    auto cur = section_eigenvalues(spec, M, n_lo, n_hi, policy);
    shift = max_shift(prev, cur);
    if (shift < policy.doubling_tol) {
      s.lambda = std::move(cur);
      s.truncation_size = M;
      s.est_truncation_error = shift;
      return s;
    }
    prev = std::move(cur);
  }
  std::ostringstream msg;
  msg << "truncation did not stabilise: last doubling to M=" << M
      << " moved eigenvalues by " << shift << " (tolerance " << policy.doubling_tol << ")";
  throw TruncationError(msg.str());
}

SpectrumSlice spectrum_of_window_operator(const TridiagonalWindow& op, long anchor,
                                          double center, long j_lo, long j_hi, double tol) {
  op.validate();
  if (j_lo > j_hi) throw DomainError("window spectrum: need j_lo <= j_hi");
  if (!std::isfinite(center)) throw DomainError("window spectrum: anchor center is not finite");
  const double inf = std::numeric_limits<double>::infinity();
  // Counts of eigenvalues <= x, so the interval is half-open on the left.
  const long below = sturm_count(op, std::nextafter(center - 0.5, inf));
  const long upto = sturm_count(op, std::nextafter(center + 0.5, inf));
  if (upto - below != 1) {
    std::ostringstream msg;
    msg << "labeling ambiguity: " << (upto - below) << " eigenvalues in ("
        << center - 0.5 << ", " << center + 0.5 << "]";
    if (upto > below) {
      msg << ":";
      const long last = std::min(upto, below + 8);
      for (long i = below + 1; i <= last; ++i) {
        msg << ' ' << eigenvalue_by_index(op, static_cast<std::size_t>(i), tol);
      }
    }
    throw LabelingError(msg.str());
  }
  const long local_anchor = below + 1;
  const long first = local_anchor + j_lo;
  const long last = local_anchor + j_hi;
  if (first < 1 || last > static_cast<long>(op.size())) {
    throw IndexError("window spectrum: requested labels leave the window");
  }
  SpectrumSlice s;
  s.n_lo = anchor + j_lo;
  s.n_hi = anchor + j_hi;
  s.labeling = Labeling::window_anchored;
  s.truncation_size = static_cast<long>(op.size());
  s.est_truncation_error = 0.0;
  s.lambda = eigenvalues_by_index(op, static_cast<std::size_t>(first),
                                  static_cast<std::size_t>(last), tol);
  return s;
}

}  // namespace rabi
