#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "rabi/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "rabi_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string cli() {
  const char* env = std::getenv("RABI_CLI");
  REQUIRE_MESSAGE(env != nullptr, "RABI_CLI must point at the rabi executable");
  return env;
}

int run(const std::string& args) {
  const std::string cmd = "cd '" + workdir().string() + "' && '" + cli() + "' " + args +
                          " > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& name, const std::string& text) { std::ofstream(workdir() / name) << text; }

}  // namespace

TEST_CASE("spectrum on an exactly solvable model") {
  write("m0.json", R"({"mode":"H0","a1":1.5,"rho":0})");
  REQUIRE(run("spectrum --model m0.json --n-lo 1 --n-hi 50 --out s0.csv") == 0);
  const auto t = rabi::read_csv(workdir() / "s0.csv");
  CHECK(t.header == std::vector<std::string>{"n", "lambda", "trunc_size", "trunc_err"});
  const auto n = t.numbers("n"), lam = t.numbers("lambda");
  REQUIRE(n.size() == 50);
  for (std::size_t i = 0; i < n.size(); ++i) CHECK(std::abs(lam[i] - (n[i] - 2.25)) <= 1e-6);
  const auto m = rabi::read_json(workdir() / "s0.csv.manifest.json");
  CHECK(m.at("exit_code") == 0);
  CHECK(m.at("command") == "spectrum");
  CHECK(m.contains("versions"));
  CHECK(m.at("truncation").contains("est_error"));
}

TEST_CASE("deterministic output") {
  write("m1.json", R"({"mode":"H0","a1":1,"rho":0.25})");
  REQUIRE(run("spectrum --model m1.json --n-lo 100 --n-hi 140 --out a.csv --jobs 2") == 0);
  REQUIRE(run("spectrum --model m1.json --n-lo 100 --n-hi 140 --out b.csv --jobs 1") == 0);
  CHECK(slurp(workdir() / "a.csv") == slurp(workdir() / "b.csv"));
  REQUIRE(run("phase-check --suite lemma63 --samples 300 --seed 5 --out p1.csv") == 0);
  REQUIRE(run("phase-check --suite lemma63 --samples 300 --seed 5 --out p2.csv") == 0);
  CHECK(slurp(workdir() / "p1.csv") == slurp(workdir() / "p2.csv"));
}

TEST_CASE("usage and error exit codes") {
  CHECK(run("spectrum --model m1.json --n-lo 1 --n-hi 5 --out x.csv --bogus") == 2);
  const auto err = slurp(workdir() / "stderr.txt");
  CHECK(err.find("--bogus") != std::string::npos);
  CHECK(err.find("Usage") != std::string::npos);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);

  write("bad.json", R"({"mode":"H0","rho":0.25})");
  CHECK(run("spectrum --model bad.json --n-lo 1 --n-hi 5 --out bad.csv") == 2);
  CHECK(rabi::read_json(workdir() / "bad.csv.manifest.json").at("exit_code") == 2);
  CHECK(run("spectrum --model m1.json --n-lo 0 --n-hi 5 --out bad2.csv") == 2);

  write("fam_big.json", R"({"members":[{"kind":"stationary_phase","symbol":"one"}]})");
  CHECK(run("oscillatory-sweep --family fam_big.json --mu-grid 1e7 --out big.csv") == 3);
}

TEST_CASE("compare reports the residual slope") {
  REQUIRE(run("spectrum --model m1.json --n-lo 200 --n-hi 800 --out s1.csv") == 0);
  REQUIRE(run("compare --model m1.json --spectrum s1.csv --source E0 --out c.csv") == 0);
  const auto t = rabi::read_csv(workdir() / "c.csv");
  CHECK(t.header == std::vector<std::string>{"n", "lambda", "pred_E", "pred_Y", "pred_GRWA", "resid_E", "resid_Y", "r_n"});
  const auto m = rabi::read_json(workdir() / "c.csv.manifest.json");
  CHECK(m.at("fit").at("slope").get<double>() <= -0.4);

  REQUIRE(run("compare --model m1.json --spectrum s1.csv --source GRWA --out cg.csv") == 0);
  const auto g = rabi::read_csv(workdir() / "cg.csv").numbers("pred_GRWA");
  CHECK(std::isfinite(g.front()));
}

TEST_CASE("remaining subcommands") {
  REQUIRE(run("gn --model m1.json --n-list 100,200 --method exp --out g.csv") == 0);
  const auto g = rabi::read_csv(workdir() / "g.csv");
  CHECK(g.header == std::vector<std::string>{"n", "k", "g_n_k", "l_n_k", "ltilde_n_k"});
  CHECK(g.rows.size() == 21 + 29);
  REQUIRE(run("gn --model m1.json --n-list 100,200 --method oscillatory --out go.csv") == 0);
  CHECK(run("gn --model m1.json --n-list 100 --method magic --out gx.csv") == 2);

  REQUIRE(run("trace-check --model m1.json --n-list 100,200 --chi gaussian:1 --out t.csv") == 0);
  CHECK(rabi::read_csv(workdir() / "t.csv").rows.size() == 2);
  CHECK(run("trace-check --model m1.json --n-list 100 --chi box:1 --out t2.csv") == 2);

  REQUIRE(run("phase-check --model m1.json --suite lemma82 --out p82.csv") == 0);
  const auto p = rabi::read_csv(workdir() / "p82.csv");
  CHECK(p.header == std::vector<std::string>{"check", "n", "omega_vec", "t_vec", "margin", "pass"});
  for (const auto& row : p.rows) CHECK(row[5] != "false");
  REQUIRE(run("phase-check --model m1.json --suite psi1 --samples 50 --out p1.csv") == 0);
  CHECK(rabi::read_json(workdir() / "p1.csv.manifest.json").at("violations") == 0);

  write("fam.json", R"({"members":[{"kind":"stationary_phase","symbol":"cos3","eta0":0.7},
                                  {"kind":"corput","symbol":"one","t1":0,"t2":3.14,"zeta":[0,1]}]})");
  REQUIRE(run("oscillatory-sweep --family fam.json --mu-grid 10,100 --out o.csv") == 0);
  const auto o = rabi::read_csv(workdir() / "o.csv");
  CHECK(o.header == std::vector<std::string>{"mu", "zeta", "value_re", "value_im", "bound", "ratio"});
  CHECK(o.rows.size() == 2 + 4);

  write("rp.json", R"({"rabi":{"omega":1,"E":0.5,"g":1,"hbar":1},"sign":"+"})");
  write("rm.json", R"({"rabi":{"omega":1,"E":0.5,"g":1,"hbar":1},"sign":"-"})");
  REQUIRE(run("spectrum --model rp.json --n-lo 100 --n-hi 600 --physical --out sp.csv") == 0);
  REQUIRE(run("spectrum --model rm.json --n-lo 100 --n-hi 600 --physical --out sm.csv") == 0);
  REQUIRE(run("recover --spectrum sp.csv --spectrum-minus sm.csv --hbar 1 --out params.json") == 0);
  const auto r = rabi::read_json(workdir() / "params.json");
  CHECK(std::abs(r.at("omega").get<double>() - 1.0) < 2e-2);
  CHECK(std::abs(r.at("g").get<double>() - 1.0) < 2e-2);
  CHECK(std::abs(r.at("E").get<double>() - 0.5) < 2e-2);
  CHECK(r.contains("rms"));
  CHECK(run("recover --spectrum sp.csv --hbar 1 --out p2.json") == 2);
}
