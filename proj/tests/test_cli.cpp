#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "subwave/circle.hpp"

namespace fs = std::filesystem;

namespace {
const fs::path kRoot = fs::temp_directory_path() / "subwave_test_cli";

int run(const std::string& args, const std::string& config = "") {
  fs::create_directories(kRoot);
  std::string cmd = std::string(SUBWAVE_CLI_PATH) + " ";
  if (!config.empty()) {
    const fs::path ini = kRoot / "run.ini";
    std::ofstream(ini) << config;
    cmd += "--config " + ini.string() + " ";
  }
  cmd += args + " > " + (kRoot / "stdout.txt").string() + " 2> " + (kRoot / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> report(const fs::path& p) {
  std::ifstream is(p);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("cli check exit codes") {
  const fs::path out = kRoot / "check";
  CHECK(run("--out " + out.string() + " check", "[run]\nlambda=0.5\n[topography]\nkind=flat\n") == 0);
  auto r = report(out / "check.txt");
  CHECK(std::stod(r["c"]) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(std::stod(r["margin"]) == 1.0);

  CHECK(run("--out " + out.string() + " check", "[topography]\namplitude=2\n") == 2);
  r = report(out / "check.txt");
  CHECK(std::stod(r["max_slope"]) == doctest::Approx(1.716).epsilon(1e-3));

  CHECK(run("--out " + out.string() + " check", "[run]\nlambda=1.2\n") == 1);
  CHECK(slurp(out / "error.json").find("\"DomainError\"") != std::string::npos);
  CHECK(run("--out " + out.string() + " check", "[run]\nfrequency=0.5\n") == 1);
  CHECK(slurp(out / "error.json").find("\"ConfigError\"") != std::string::npos);
  CHECK(run("frobnicate") == 1);
  CHECK(run("--threads 0 check") == 1);
}

TEST_CASE("cli scatter on a flat channel writes the identity") {
  const fs::path out = kRoot / "scatter";
  CHECK(run("--out " + out.string() + " scatter",
            "[topography]\nkind=flat\n[scattering]\nK=16\ntrials=5\n") == 0);
  std::ifstream is(out / "S.csv");
  std::string line;
  std::getline(is, line);
  CHECK(line == "j,k,re,im");
  double worst = 0.0;
  int rows = 0;
  while (std::getline(is, line)) {
    int j, k;
    double re, im;
    char c;
    std::istringstream ls(line);
    ls >> j >> c >> k >> c >> re >> c >> im;
    worst = std::max(worst, std::abs(std::complex<double>(re, im) - (j == k ? 1.0 : 0.0)));
    ++rows;
  }
  CHECK(rows == 32 * 32);
  CHECK(worst < 1e-10);
  auto r = report(out / "diagnostics.txt");
  CHECK(std::stod(r["remainder_max"]) < 1e-10);
  CHECK(r.count("inner_band_agreement") == 1);
  CHECK(slurp(out / "manifest.scatter.txt").find("  S.bin\n") != std::string::npos);
}

TEST_CASE("cli solve: zero source and determinism") {
  const std::string cfg =
      "[scattering]\nK=32\n[stationary]\nn1=64\nn2=16\n[source]\nkind=zero\n";
  const fs::path a = kRoot / "solve_a", b = kRoot / "solve_b";
  CHECK(run("--out " + a.string() + " solve", cfg) == 0);
  CHECK(std::stod(report(a / "diagnostics.txt")["field_h1_norm"]) == 0.0);
  const std::string cfg2 = "[scattering]\nK=32\n[stationary]\nn1=64\nn2=16\n";
  CHECK(run("--out " + a.string() + " --seed 5 solve", cfg2) == 0);
  CHECK(run("--out " + b.string() + " --seed 5 solve", cfg2) == 0);
  CHECK(slurp(a / "manifest.solve.txt") == slurp(b / "manifest.solve.txt"));
  CHECK(slurp(a / "field.grid") == slurp(b / "field.grid"));
  std::ifstream vl(a / "v_L.csv");
  CHECK(subwave::read_form_csv(vl).order() == 32);
}

TEST_CASE("cli evolve and extract") {
  const std::string cfg =
      "[scattering]\nK=32\n[evolution]\nT_final=20\nh1=0.25\nn2=8\nstride=1\n[source]\nkind=zero\n";
  const fs::path out = kRoot / "evolve";
  fs::remove_all(out);
  CHECK(run("--out " + out.string() + " evolve", cfg) == 0);
  CHECK(fs::exists(out / "snapshots" / "snap_0000000.grid"));
  CHECK(slurp(out / "trace.csv").rfind("step,time,h1_norm\n0,0,0\n", 0) == 0);
  CHECK(run("--out " + out.string() + " extract", cfg) == 0);
  auto r = report(out / "extract.txt");
  CHECK(std::stod(r["h1_norm"]) == 0.0);
  CHECK(std::stod(r["reference_h1_norm"]) == 0.0);
  CHECK(run("--out " + out.string() + " extract",
            "[evolution]\nT_final=20\nh1=0.25\nn2=8\nstride=1\ndt=0.5\n[run]\nlambda=0.95\n"
            "[source]\nkind=zero\n") != 0);
}
