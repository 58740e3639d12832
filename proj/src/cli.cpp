#include "rabi/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "json.hpp"
#include "rabi/asymptotics.hpp"
#include "rabi/eigensolve.hpp"
#include "rabi/errors.hpp"
#include "rabi/fit.hpp"
#include "rabi/inverse.hpp"
#include "rabi/io.hpp"
#include "rabi/oscillatory.hpp"
#include "rabi/phase.hpp"
#include "rabi/transform.hpp"

namespace rabi {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Results must be
// written to slots owned by i; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    T value{};
    try {
      if constexpr (std::is_integral_v<T>) {
        value = static_cast<T>(std::stol(item, &used));
      } else {
        value = static_cast<T>(std::stod(item, &used));
      }
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw DomainError(std::string("bad entry in ") + what + ": '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) throw DomainError(std::string(what) + " is empty");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += format_double(v[i]);
  }
  return s;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json compiler_info() {
  return {{"rabi", kVersion},
          {"compiler", __VERSION__},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"cli11", CLI11_VERSION}};
}

fs::path manifest_path(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

std::optional<fs::path> cache_dir() {
  const char* env = std::getenv("RABI_CACHE_DIR");
  if (env == nullptr || *env == '\0') return std::nullopt;
  fs::path p(env);
  fs::create_directories(p);
  return p;
}

std::string model_key(const ModelSpec& spec) {
  ModelDescriptor d;
  d.spec = spec;
  const auto text = model_to_json(d).dump();
  std::ostringstream os;
  os << std::hex << std::hash<std::string>{}(text);
  return os.str();
}

// g_n on the default window, read from RABI_CACHE_DIR when present.
std::vector<double> cached_gn(const ModelSpec& spec, long n, long& first) {
  const long W = default_half_width(spec, n);
  first = n - W;
  const auto dir = cache_dir();
  fs::path stem;
  if (dir) {
    stem = *dir / ("gn_" + model_key(spec) + "_n" + std::to_string(n) + "_W" + std::to_string(W));
    if (fs::exists(fs::path(stem.string() + ".json"))) {
      auto [values, meta] = read_diagonal_fixture(stem);
      if (values.size() == static_cast<std::size_t>(2 * W + 1)) return values;
    }
  }
  AuxiliaryOptions opts;
  opts.dense_vtilde = false;
  const auto aux = build_auxiliary(spec, n, W, {}, opts);
  if (dir) {
    write_diagonal_fixture(stem, aux.gn, {{"n", n}, {"W", W}, {"first", first}});
  }
  return aux.gn;
}

double cached_gn_at(const ModelSpec& spec, long n, long k) {
  long first = 0;
  const auto g = cached_gn(spec, n, first);
  const long W = (static_cast<long>(g.size()) - 1) / 2;
  if (k - first < 5 || (n + W) - k < 5) throw WindowError("g_n(k) requested near the window edge");
  return g[static_cast<std::size_t>(k - first)];
}

struct Slice {
  SpectrumSlice slice;
  bool physical = false;
};

// Reads `n,lambda[,...,branch]`. Physical spectra are mapped back with the
// descriptor's spectral map.
Slice read_spectrum_for(const ModelDescriptor& model, const fs::path& path) {
  const auto table = read_csv(path);
  const auto ns = table.numbers("n");
  const auto ls = table.numbers("lambda");
  if (ns.empty()) throw DomainError("spectrum file has no rows");
  Slice out;
  out.physical = table.find("branch").has_value();
  if (out.physical) {
    if (!model.rabi) throw DomainError("physical spectrum needs a model with a rabi block");
    const auto col = table.index("branch");
    const std::string want = model.branch == Branch::plus ? "+" : "-";
    for (const auto& row : table.rows) {
      if (row[col] != want) throw DomainError("spectrum branch does not match the model sign");
    }
  }
  out.slice.n_lo = static_cast<long>(ns.front());
  out.slice.n_hi = static_cast<long>(ns.back());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] != static_cast<double>(out.slice.n_lo + static_cast<long>(i))) {
      throw DomainError("spectrum indices must be consecutive and increasing");
    }
    out.slice.lambda.push_back(out.physical ? model.map.inverse(ls[i]) : ls[i]);
  }
  return out;
}

BranchSpectrum read_branch(const fs::path& path, std::optional<std::string> only) {
  const auto table = read_csv(path);
  const auto ncol = table.index("n");
  const auto lcol = table.index("lambda");
  const auto bcol = table.find("branch");
  BranchSpectrum s;
  for (const auto& row : table.rows) {
    if (only && bcol && row[*bcol] != *only) continue;
    s.n.push_back(std::stol(row[ncol]));
    s.lambda.push_back(std::stod(row[lcol]));
  }
  return s;
}

struct Context {
  std::vector<std::string> argv;
  unsigned jobs = 1;
  fs::path out;
  json manifest;
};

int cmd_spectrum(Context& ctx, const fs::path& model_path, long n_lo, long n_hi,
                 const std::string& trunc, double tol, bool physical) {
  const auto model = load_model(model_path);
  if (physical && !model.rabi) throw DomainError("--physical needs a model with a rabi block");
  auto policy = TruncationPolicy::parse(trunc);
  policy.bisection_tol = tol;
  policy.jobs = ctx.jobs;
  const auto slice = spectrum_of_J(model.spec, n_lo, n_hi, policy);

  std::vector<std::string> header{"n", "lambda", "trunc_size", "trunc_err"};
  if (physical) header.push_back("branch");
  CsvWriter csv(ctx.out, header);
  const double scale = physical ? std::abs(model.map.scale) : 1.0;
  for (long n = slice.n_lo; n <= slice.n_hi; ++n) {
    const double lam = slice.at(n);
    csv.cell(n).cell(physical ? model.map(lam) : lam).cell(slice.truncation_size)
        .cell(scale * slice.est_truncation_error);
    if (physical) csv.cell(std::string(model.branch == Branch::plus ? "+" : "-"));
    csv.end_row();
  }
  ctx.manifest["model"] = model_to_json(model);
  ctx.manifest["truncation"] = {{"policy", trunc},
                                {"size", slice.truncation_size},
                                {"est_error", slice.est_truncation_error},
                                {"doubling_tol", policy.doubling_tol},
                                {"bisection_tol", tol}};
  ctx.manifest["labeling"] = "nondecreasing-count";
  ctx.manifest["physical"] = physical;
  return 0;
}

int cmd_compare(Context& ctx, const fs::path& model_path, const fs::path& spectrum_path,
                const std::string& source_text) {
  const auto model = load_model(model_path);
  const auto source = parse_source(source_text);
  const auto data = read_spectrum_for(model, spectrum_path);
  const auto& slice = data.slice;
  const auto& spec = model.spec;
  const auto ns = slice.indices();

  const Source e_source = spec.mode() == Mode::H0 ? Source::E0 : Source::E2;
  const auto pe = predict_table(spec, ns, e_source);
  const auto py = predict_table(spec, ns, Source::Y0);
  PredictionTable pg;
  if (source == Source::GRWA) {
    const auto centred = spec.centered();
    std::vector<double> g(ns.size());
    parallel_for(ns.size(), ctx.jobs, [&](std::size_t i) { g[i] = cached_gn_at(centred, ns[i], ns[i]); });
    GnProvider provider{"exp", [&](long n) { return g[static_cast<std::size_t>(n - ns.front())]; }};
    pg = predict_table(spec, ns, Source::GRWA, &provider);
  }

  CsvWriter csv(ctx.out, {"n", "lambda", "pred_E", "pred_Y", "pred_GRWA", "resid_E", "resid_Y", "r_n"});
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double lam = slice.lambda[i];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    csv.cell(ns[i]).cell(lam).cell(pe[i].prediction).cell(py[i].prediction)
        .cell(pg.empty() ? nan : pg[i].prediction).cell(lam - pe[i].prediction)
        .cell(lam - py[i].prediction).cell(pe[i].oscillatory);
    csv.end_row();
  }

  const PredictionTable* chosen = nullptr;
  PredictionTable own;
  switch (source) {
    case Source::E0:
    case Source::E2:
      own = predict_table(spec, ns, source);
      chosen = &own;
      break;
    case Source::Y0: chosen = &py; break;
    case Source::GRWA: chosen = &pg; break;
  }
  const auto fit = residual_fit(slice, *chosen);
  ctx.manifest["model"] = model_to_json(model);
  ctx.manifest["source"] = to_string(source);
  ctx.manifest["pred_E_source"] = to_string(e_source);
  ctx.manifest["fit"] = {{"slope", number_or_null(fit.slope)},
                         {"intercept", number_or_null(fit.intercept)},
                         {"correlation", number_or_null(fit.correlation)},
                         {"count", fit.count},
                         {"exact", fit.exact},
                         {"max_abs_residual", fit.max_abs_residual},
                         {"remainder_exponent", chosen->front().remainder_exponent}};
  std::cout << "slope " << format_double(fit.slope) << " correlation " << format_double(fit.correlation)
            << "\n";
  return 0;
}

int cmd_gn(Context& ctx, const fs::path& model_path, const std::string& n_list,
           const std::string& method, long radius_opt) {
  const auto model = load_model(model_path);
  if (method != "exp" && method != "oscillatory") throw DomainError("--method must be exp or oscillatory");
  const auto ns = parse_list<long>(n_list, "--n-list");
  const auto centred = model.spec.centered();
  const bool general = method == "oscillatory" && model.spec.period() != 2;

  struct Row {
    long k;
    double g, l;
  };
  std::vector<std::vector<Row>> rows(ns.size());
  parallel_for(ns.size(), ctx.jobs, [&](std::size_t i) {
    const long n = ns[i];
    const long radius = general ? 0
                        : radius_opt >= 0
                            ? radius_opt
                            : static_cast<long>(std::floor(std::pow(static_cast<double>(n), model.spec.gamma())));
    std::vector<double> g;
    long first = 0;
    if (method == "exp") g = cached_gn(centred, n, first);
    for (long k = n - radius; k <= n + radius; ++k) {
      double gv = 0.0;
      if (method == "exp") {
        const long W = (static_cast<long>(g.size()) - 1) / 2;
        if (k - first < 5 || (n + W) - k < 5) throw WindowError("--radius reaches the window edge");
        gv = g[static_cast<std::size_t>(k - first)];
      } else {
        gv = general ? g_frak_generalN(model.spec, n) : g_frak(model.spec, n, k);
      }
      rows[i].push_back({k, gv, ln_value(centred, n, k)});
    }
  });

  CsvWriter csv(ctx.out, {"n", "k", "g_n_k", "l_n_k", "ltilde_n_k"});
  for (std::size_t i = 0; i < ns.size(); ++i) {
    for (const auto& r : rows[i]) {
      csv.cell(ns[i]).cell(r.k).cell(r.g).cell(r.l).cell(r.l + r.g);
      csv.end_row();
    }
  }
  ctx.manifest["model"] = model_to_json(model);
  ctx.manifest["method"] = method;
  ctx.manifest["note"] = "l_n and g_n refer to the model with its mean alpha0 removed";
  return 0;
}

int cmd_trace(Context& ctx, const fs::path& model_path, const std::string& n_list,
              const std::string& chi_text) {
  const auto model = load_model(model_path);
  const auto ns = parse_list<long>(n_list, "--n-list");
  const std::string prefix = "gaussian:";
  if (chi_text.rfind(prefix, 0) != 0) throw DomainError("--chi must be gaussian:sigma");
  const double sigma = parse_list<double>(chi_text.substr(prefix.size()), "sigma").front();
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  const TestFunction chi = [sigma](double x) { return std::exp(-0.5 * (x / sigma) * (x / sigma)); };

  std::vector<TraceReport> reps(ns.size());
  std::vector<long> Ws(ns.size());
  parallel_for(ns.size(), ctx.jobs, [&](std::size_t i) {
    const auto aux = build_auxiliary(model.spec, ns[i]);
    Ws[i] = aux.W;
    reps[i] = trace_functional(aux, chi);
  });

  CsvWriter csv(ctx.out, {"n", "W", "value", "tail_bound", "leakage", "leakage_warning"});
  std::vector<double> x, y;
  bool warned = false;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    csv.cell(ns[i]).cell(Ws[i]).cell(reps[i].value).cell(reps[i].tail_bound).cell(reps[i].leakage)
        .cell(std::string(reps[i].leakage_warning ? "true" : "false"));
    csv.end_row();
    x.push_back(static_cast<double>(ns[i]));
    y.push_back(reps[i].value);
    warned = warned || reps[i].leakage_warning;
  }
  ctx.manifest["model"] = model_to_json(model);
  ctx.manifest["chi"] = {{"kind", "gaussian"}, {"sigma", sigma}};
  ctx.manifest["leakage_warning"] = warned;
  if (ns.size() >= 2) ctx.manifest["slope"] = number_or_null(fit_loglog(x, y).slope);
  if (warned) std::cerr << "warning: spectral leakage above tolerance at the window edge\n";
  return 0;
}

int cmd_phase(Context& ctx, const std::optional<fs::path>& model_path, const std::string& suite,
              long samples, std::uint64_t seed, const std::string& n_list, long n_psi1) {
  if (samples < 1) throw DomainError("--samples must be positive");
  std::optional<ModelDescriptor> model;
  if (model_path) model = load_model(*model_path);
  CsvWriter csv(ctx.out, {"check", "n", "omega_vec", "t_vec", "margin", "pass"});
  long violations = 0, skipped = 0;
  auto verdict = [&](bool ok) {
    if (!ok) ++violations;
    return std::string(ok ? "true" : "false");
  };

  if (suite == "lemma63") {
    std::mt19937_64 rng(seed);
    constexpr double kIdentityTol = 1e-12;
    for (long s = 0; s < samples; ++s) {
      const int N = model ? model->spec.period() : 2 + static_cast<int>(rng() % 5);
      const std::size_t nu = 2 + static_cast<std::size_t>(rng() % 5);
      const auto state = random_phase_state(rng(), N, nu);
      const auto r = z_bounds_check(state, N);
      const auto w = join(state.omegas), t = join(state.times);
      csv.cell(std::string("modulus_identity")).cell(0L).cell(w).cell(t)
          .cell(kIdentityTol - std::abs(r.modulus_identity_error))
          .cell(verdict(std::abs(r.modulus_identity_error) <= kIdentityTol));
      csv.end_row();
      csv.cell(std::string("lower_bound")).cell(0L).cell(w).cell(t).cell(r.lower_bound_margin)
          .cell(verdict(r.lower_bound_margin >= -1e-12));
      csv.end_row();
      csv.cell(std::string("derivative_bound")).cell(0L).cell(w).cell(t);
      if (r.derivative_skipped) {
        ++skipped;
        csv.cell(std::numeric_limits<double>::quiet_NaN()).cell(std::string("skipped"));
      } else {
        csv.cell(r.derivative_margin).cell(verdict(r.derivative_margin >= -1e-12));
      }
      csv.end_row();
    }
  } else if (suite == "lemma82") {
    if (!model) throw DomainError("lemma82 needs --model");
    const auto ns = n_list.empty() ? std::vector<long>{64, 128, 256, 512, 1024, 2048, 4096}
                                   : parse_list<long>(n_list, "--n-list");
    const auto omegas = omega_set(model->spec.period());
    std::vector<std::vector<DecaySample>> samples_by_n(ns.size());
    parallel_for(ns.size(), ctx.jobs, [&](std::size_t i) {
      const PhaseField field(model->spec, ns[i]);
      for (double w : omegas) samples_by_n[i].push_back(lemma82_sample(field, w));
    });
    const double limit = -model->spec.gamma() + 0.15;
    for (std::size_t m = 0; m < omegas.size(); ++m) {
      std::vector<double> x, r, p;
      for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto& d = samples_by_n[i][m];
        csv.cell(std::string("r_sup")).cell(ns[i]).cell(format_double(omegas[m])).cell(std::string(""))
            .cell(d.r_sup).cell(std::string("-"));
        csv.end_row();
        csv.cell(std::string("psi_II_stationary")).cell(ns[i]).cell(format_double(omegas[m]))
            .cell(std::string("")).cell(d.psi_II_stationary).cell(std::string("-"));
        csv.end_row();
        x.push_back(static_cast<double>(ns[i]));
        r.push_back(d.r_sup);
        p.push_back(d.psi_II_stationary);
      }
      if (ns.size() >= 2) {
        for (auto [name, ys] : {std::pair{"r_sup_slope", &r}, std::pair{"psi_II_slope", &p}}) {
          // An identically vanishing series decays trivially.
          const bool zero = std::all_of(ys->begin(), ys->end(), [](double y) { return y == 0.0; });
          const double slope = zero ? -std::numeric_limits<double>::infinity() : fit_loglog(x, *ys).slope;
          csv.cell(std::string(name)).cell(0L).cell(format_double(omegas[m])).cell(std::string(""))
              .cell(limit - slope).cell(verdict(slope <= limit));
          csv.end_row();
        }
      }
    }
  } else if (suite == "psi1") {
    if (!model) throw DomainError("psi1 needs --model");
    const int N = model->spec.period();
    std::mt19937_64 rng(seed);
    for (long s = 0; s < samples; ++s) {
      const std::size_t nu = 1 + static_cast<std::size_t>(rng() % 5);
      const auto state = random_phase_state(rng(), N, nu);
      const auto r = psi1_recursion_check(state.omegas, state.times, model->spec, n_psi1);
      csv.cell(std::string("psi1")).cell(n_psi1).cell(join(state.omegas)).cell(join(state.times))
          .cell(r.tolerance - r.max_deviation).cell(verdict(r.pass));
      csv.end_row();
    }
  } else {
    throw DomainError("--suite must be lemma63, lemma82 or psi1");
  }
  if (model) ctx.manifest["model"] = model_to_json(*model);
  ctx.manifest["suite"] = suite;
  ctx.manifest["samples"] = samples;
  ctx.manifest["seed"] = seed;
  ctx.manifest["violations"] = violations;
  ctx.manifest["skipped"] = skipped;
  std::cout << suite << ": " << violations << " violations, " << skipped << " skipped\n";
  return 0;
}

const PeriodicSymbol& symbol_by_name(const std::vector<PeriodicSymbol>& family, const std::string& name) {
  for (const auto& s : family) {
    if (s.name == name) return s;
  }
  throw DomainError("unknown symbol '" + name + "'");
}

int cmd_oscillatory(Context& ctx, const fs::path& family_path, const std::string& mu_grid) {
  const auto family_json = read_json(family_path);
  const auto mus = parse_list<double>(mu_grid, "--mu-grid");
  for (double mu : mus) {
    if (!(mu > 0.0)) throw DomainError("--mu-grid entries must be positive");
  }
  auto family = stationary_phase_family();
  for (auto& s : calibration_symbols()) family.push_back(std::move(s));

  json members = json::array();
  try {
    members = family_json.at("members");
  } catch (const json::exception& e) {
    throw DomainError(std::string("family file: ") + e.what());
  }
  if (!members.is_array() || members.empty()) throw DomainError("family file: members must be a non-empty array");

  struct Row {
    double mu, zeta;
    cplx value;
    double bound, ratio;
  };
  std::vector<std::vector<Row>> rows(members.size());
  json described = json::array();
  for (const auto& m : members) described.push_back(m);

  parallel_for(members.size(), ctx.jobs, [&](std::size_t i) {
    const auto& m = members[i];
    try {
      const std::string kind = m.at("kind");
      const auto& b = symbol_by_name(family, m.at("symbol").get<std::string>());
      if (kind == "stationary_phase") {
        const double eta0 = m.value("eta0", 0.0);
        const double norm = b.c2_norm();
        for (double mu : mus) {
          const auto I = integral_I(b, mu, eta0);
          const auto sp = stationary_phase(b, mu, eta0);
          rows[i].push_back({mu, 0.0, I, sp.remainder_bound,
                             std::abs(I - sp.main_term) * mu / (norm > 0.0 ? norm : 1.0)});
        }
      } else if (kind == "corput") {
        const double t1 = m.at("t1"), t2 = m.at("t2");
        std::vector<double> zetas = m.value("zeta", std::vector<double>{0.0});
        for (double zeta : zetas) {
          for (double mu : mus) {
            CorputIntegrand ci{b.fn, t1, t2, zeta, mu};
            ci.validate();
            const auto J = integral_J(ci);
            const double bound = corput_bound(ci);
            const double unit = corput_bound(ci, 1.0);
            rows[i].push_back({mu, zeta, J, bound, std::abs(J) / unit});
          }
        }
      } else {
        throw DomainError("member kind must be stationary_phase or corput");
      }
    } catch (const json::exception& e) {
      throw DomainError(std::string("family member: ") + e.what());
    }
  });

  CsvWriter csv(ctx.out, {"mu", "zeta", "value_re", "value_im", "bound", "ratio"});
  for (const auto& group : rows) {
    for (const auto& r : group) {
      csv.cell(r.mu).cell(r.zeta).cell(r.value.real()).cell(r.value.imag()).cell(r.bound).cell(r.ratio);
      csv.end_row();
    }
  }
  ctx.manifest["members"] = described;
  ctx.manifest["rows_per_member"] = [&] {
    json a = json::array();
    for (const auto& g : rows) a.push_back(g.size());
    return a;
  }();
  ctx.manifest["constants"] = {{"C0", kStationaryPhaseC0}, {"C_corput", kCorputConstant}};
  ctx.manifest["ratio_definition"] = {
      {"stationary_phase", "mu |I - main| / ||b||_C2, compare with C0"},
      {"corput", "|J| sqrt(mu) / ((1 + sqrt(zeta)) M(b)), compare with C_corput"}};
  return 0;
}

int cmd_recover(Context& ctx, const fs::path& plus_path, const std::optional<fs::path>& minus_path,
                double hbar) {
  BranchSpectrum plus, minus;
  if (minus_path) {
    plus = read_branch(plus_path, std::string("+"));
    minus = read_branch(*minus_path, std::string("-"));
  } else {
    if (!read_csv(plus_path).find("branch")) {
      throw DomainError("without --spectrum-minus the spectrum needs a branch column");
    }
    plus = read_branch(plus_path, std::string("+"));
    minus = read_branch(plus_path, std::string("-"));
  }
  const auto r = recover_parameters(plus, minus, hbar);
  json out = {{"omega", r.params.omega}, {"E", r.params.E}, {"g", r.params.g}, {"rms", r.rms}};
  write_json(ctx.out, out);
  ctx.manifest["hbar"] = hbar;
  ctx.manifest["diagnostics"] = {{"a1", r.a1},
                                 {"rho", r.rho},
                                 {"rho_raw", r.rho_raw},
                                 {"rho_confidence", r.rho_confidence},
                                 {"rho_below_noise", r.rho_below_noise},
                                 {"spacing_trend", r.spacing_trend},
                                 {"n_min", r.n_min},
                                 {"n_max", r.n_max},
                                 {"count", r.count}};
  ctx.manifest["estimator"] = "median spacing, median offset, matched filter with golden-section refinement";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  Context ctx;
  for (int i = 0; i < argc; ++i) ctx.argv.emplace_back(argv[i]);

  CLI::App app{"Eigenvalue asymptotics of periodic Jacobi operators and the quantum Rabi model", "rabi"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--jobs", jobs, "Worker threads for batches over n")->check(CLI::PositiveNumber);
  app.set_version_flag("--version", kVersion);

  std::string out;
  fs::path model_path;
  std::function<int()> action;

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of J by truncation and bisection");
  long n_lo = 0, n_hi = 0;
  std::string trunc = "double";
  double tol = 1e-10;
  bool physical = false;
  spectrum->add_option("--model", model_path)->required();
  spectrum->add_option("--n-lo", n_lo)->required();
  spectrum->add_option("--n-hi", n_hi)->required();
  spectrum->add_option("--out", out)->required();
  spectrum->add_option("--trunc-policy", trunc, "double or fixed:M");
  spectrum->add_option("--tol", tol, "Bisection tolerance");
  spectrum->add_flag("--physical", physical, "Rabi models: map to H eigenvalues and add a branch column");
  spectrum->callback([&] { action = [&] { return cmd_spectrum(ctx, model_path, n_lo, n_hi, trunc, tol, physical); }; });

  auto* compare = app.add_subcommand("compare", "Residuals of a spectrum against the asymptotic formulas");
  fs::path spectrum_path;
  std::string source;
  compare->add_option("--model", model_path)->required();
  compare->add_option("--spectrum", spectrum_path)->required();
  compare->add_option("--source", source, "E0, E2, Y0 or GRWA")->required();
  compare->add_option("--out", out)->required();
  compare->callback([&] { action = [&] { return cmd_compare(ctx, model_path, spectrum_path, source); }; });

  auto* gn = app.add_subcommand("gn", "Diagonal of the conjugated potential");
  std::string n_list, method = "exp";
  long radius = -1;
  gn->add_option("--model", model_path)->required();
  gn->add_option("--n-list", n_list)->required();
  gn->add_option("--method", method, "exp or oscillatory");
  gn->add_option("--radius", radius, "Rows |k - n| <= radius; default floor(n^gamma)");
  gn->add_option("--out", out)->required();
  gn->callback([&] { action = [&] { return cmd_gn(ctx, model_path, n_list, method, radius); }; });

  auto* trace = app.add_subcommand("trace-check", "Trace functional on the window");
  std::string chi = "gaussian:1";
  trace->add_option("--model", model_path)->required();
  trace->add_option("--n-list", n_list)->required();
  trace->add_option("--chi", chi, "gaussian:sigma");
  trace->add_option("--out", out)->required();
  trace->callback([&] { action = [&] { return cmd_trace(ctx, model_path, n_list, chi); }; });

  auto* phase = app.add_subcommand("phase-check", "Phase function identities and bounds");
  std::string suite;
  long samples = 1000;
  std::uint64_t seed = 1;
  long n_psi1 = 256;
  std::optional<fs::path> phase_model;
  phase->add_option("--model", phase_model);
  phase->add_option("--suite", suite, "lemma63, lemma82 or psi1")->required();
  phase->add_option("--samples", samples);
  phase->add_option("--seed", seed);
  phase->add_option("--n-list", n_list, "lemma82 sweep; default powers of two 64..4096");
  phase->add_option("--n", n_psi1, "psi1 suite anchor");
  phase->add_option("--out", out)->required();
  phase->callback([&] {
    action = [&] { return cmd_phase(ctx, phase_model, suite, samples, seed, n_list, n_psi1); };
  });

  auto* osc = app.add_subcommand("oscillatory-sweep", "Oscillatory integrals against their bounds");
  fs::path family;
  std::string mu_grid;
  osc->add_option("--family", family)->required();
  osc->add_option("--mu-grid", mu_grid)->required();
  osc->add_option("--out", out)->required();
  osc->callback([&] { action = [&] { return cmd_oscillatory(ctx, family, mu_grid); }; });

  auto* rec = app.add_subcommand("recover", "Estimate omega, E and g from both branches");
  fs::path plus_path;
  std::optional<fs::path> minus_path;
  double hbar = 1.0;
  rec->add_option("--spectrum", plus_path)->required();
  rec->add_option("--spectrum-minus", minus_path);
  rec->add_option("--hbar", hbar)->required();
  rec->add_option("--out", out)->required();
  rec->callback([&] { action = [&] { return cmd_recover(ctx, plus_path, minus_path, hbar); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  ctx.jobs = jobs;
  ctx.out = out;
  ctx.manifest = {{"command", app.get_subcommands().front()->get_name()},
                  {"argv", json(std::vector<std::string>(ctx.argv.begin() + 1, ctx.argv.end()))},
                  {"versions", compiler_info()},
                  {"jobs", jobs},
                  {"output", out}};
  int code = 0;
  std::string message;
  try {
    code = action();
  } catch (const Error& e) {
    code = e.exit_code();
    message = e.what();
  } catch (const std::exception& e) {
    code = 2;
    message = e.what();
  }
  ctx.manifest["exit_code"] = code;
  if (!message.empty()) {
    ctx.manifest["error"] = message;
    std::cerr << "error: " << message << "\n";
  }
  try {
    write_json(manifest_path(ctx.out), ctx.manifest);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot write manifest: " << e.what() << "\n";
    if (code == 0) code = 2;
  }
  return code;
}

}  // namespace rabi
