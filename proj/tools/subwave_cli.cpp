#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "subwave/config.hpp"
#include "subwave/io.hpp"
#include "subwave/parallel.hpp"

using namespace subwave;
namespace fs = std::filesystem;

namespace {

using Report = std::vector<std::pair<std::string, std::string>>;

std::string num(double v) { return format_double(v); }

void print(const Report& r) {
  for (const auto& [k, v] : r) std::cout << k << '=' << v << '\n';
}

void add_warnings(Report& r, const Warnings& w) {
  r.emplace_back("warnings", std::to_string(w.size()));
  for (std::size_t k = 0; k < w.size(); ++k)
    r.emplace_back("warning." + std::to_string(k), w[k].kind + ": " + w[k].message);
}

std::string lambda_dir(std::size_t index, std::size_t count) {
  return count == 1 ? std::string() : "lambda_" + std::to_string(index) + "/";
}

int cmd_check(const RunConfig& cfg, Manifest& out) {
  const Topography topo = cfg.topography();
  Report r{{"topography", topo.describe()}, {"R0", num(topo.support_radius())}};
  int code = 0;
  const auto lams = cfg.lambdas();
  for (std::size_t k = 0; k < lams.size(); ++k) {
    const std::string p = lams.size() == 1 ? "" : "lambda_" + std::to_string(k) + ".";
    r.emplace_back(p + "lambda", num(lams[k]));
    r.emplace_back(p + "c", num(characteristic_slope(lams[k])));
    try {
      const Channel ch(topo, lams[k]);
      r.emplace_back(p + "max_slope", num(ch.params().max_slope));
      r.emplace_back(p + "margin", num(ch.params().subcritical_margin));
      r.emplace_back(p + "M", num(ch.params().M));
      r.emplace_back(p + "N", std::to_string(ch.intervals().N));
      r.emplace_back(p + "J_L", "[" + num(ch.intervals().theta0) + ", " +
                                    num(ch.intervals().theta0 + 2 * M_PI) + ")");
      r.emplace_back(p + "J_R", "[" + num(ch.intervals().theta_R0) + ", " +
                                    num(ch.intervals().theta_R0 + 2 * M_PI) + ")");
      r.emplace_back(p + "subcritical", "true");
    } catch (const SupercriticalError& e) {
      r.emplace_back(p + "max_slope", num(e.max_slope()));
      r.emplace_back(p + "subcritical", "false");
      code = 2;
    }
  }
  write_report(out.path("check.txt"), r);
  out.add("check.txt");
  print(r);
  return code;
}

int cmd_billiard(const RunConfig& cfg, Manifest& out) {
  const Topography topo = cfg.topography();
  const auto lams = cfg.lambdas();
  const int n = cfg.integer("billiard.samples");
  for (std::size_t k = 0; k < lams.size(); ++k) {
    const Channel ch(topo, lams[k]);
    const auto& fi = ch.intervals();
    double a = cfg.number("billiard.x1_min"), b = cfg.number("billiard.x1_max");
    if (a == b) {
      a = fi.theta0 / ch.c();
      b = (fi.theta_R0 + 2 * M_PI) / ch.c();
    }
    const std::string dir = lambda_dir(k, lams.size());
    {
      std::ofstream os(out.path(dir + "billiard.csv"));
      os << "x1,b,db\n";
      for (int m = 0; m < n; ++m) {
        const double x = a + (b - a) * m / (n - 1);
        os << num(x) << ',' << num(billiard(ch.params(), topo, x)) << ','
           << num(billiard_derivative(ch.params(), topo, x)) << '\n';
      }
    }
    {
      std::ofstream os(out.path(dir + "circle_map.csv"));
      os << "phi,beta,dbeta\n";
      for (int m = 0; m < n; ++m) {
        const double phi = 2 * M_PI * m / n;
        const CirclePoint p = circle_map(fi, ch.params(), topo, phi);
        os << num(phi) << ',' << num(p.angle) << ',' << num(p.derivative) << '\n';
      }
    }
    out.add(dir + "billiard.csv");
    out.add(dir + "circle_map.csv");
  }
  std::cout << "lambdas=" << lams.size() << "\nsamples=" << n << '\n';
  return 0;
}

int cmd_scatter(const RunConfig& cfg, Manifest& out) {
  const Topography topo = cfg.topography();
  const auto lams = cfg.lambdas();
  const ScatteringOptions opt = cfg.scattering();
  const int trials = cfg.integer("scattering.trials");
  const int cK = cfg.integer("scattering.compare_K") > 0 ? cfg.integer("scattering.compare_K")
                                                         : std::max(4, opt.K / 2);
  std::vector<Report> reports(lams.size());
  parallel_for(int(lams.size()), cfg.threads(), [&](int k) {
    const Channel ch(topo, lams[k]);
    ScatteringAssembly a = build_scattering(ch, opt);
    const SmoothingRemainder rem = smoothing_remainder(a);
    const ScatteringDiagnostics d = diagnose_scattering(a, trials, cfg.seed());
    ScatteringOptions copt = opt;
    copt.K = cK;
    copt.n_quad = 0;
    const ScatteringAssembly b = build_scattering(ch, copt);
    const int band = std::min(opt.K, cK) / 4;
    double agree = 0.0;
    for (int j = -band; j <= band; ++j)
      for (int l = -band; l <= band; ++l) {
        if (j == 0 || l == 0) continue;
        agree = std::max(agree, std::abs(a.S(CircleForm::index(j, opt.K), CircleForm::index(l, opt.K)) -
                                         b.S(CircleForm::index(j, cK), CircleForm::index(l, cK))));
      }
    const std::string dir = lambda_dir(k, lams.size());
    const std::string h = topography_hash(topo);
    write_mode_matrix_csv(out.path(dir + "S.csv"), a.S, opt.K);
    write_mode_matrix_csv(out.path(dir + "R.csv"), rem.R, opt.K);
    write_matrix_file(out.path(dir + "S.bin"), a.S, lams[k], h);
    write_matrix_file(out.path(dir + "R.bin"), rem.R, lams[k], h);
    Report& r = reports[k];
    r = {{"lambda", num(lams[k])},
         {"K", std::to_string(opt.K)},
         {"cond_T", num(a.cond_T)},
         {"min_singular_T", num(a.min_singular_T)},
         {"trials", std::to_string(d.trials)},
         {"unitarity_defect_h_half", num(d.unitarity_defect_h_half)},
         {"unitarity_defect_h_minus_half", num(d.unitarity_defect_h_minus_half)},
         {"flux_balance_defect", num(d.flux_balance_defect)},
         {"primitive_flux_balance_defect", num(d.primitive_flux_balance_defect)},
         {"transport_residual", num(d.transport_residual)},
         {"remainder_band", std::to_string(rem.band)},
         {"remainder_max", num(rem.max_abs)},
         {"C2", num(rem.C2)},
         {"C4", num(rem.C4)},
         {"C6", num(rem.C6)},
         {"compare_K", std::to_string(cK)},
         {"inner_band_agreement", num(agree)}};
    add_warnings(r, a.warnings);
    write_report(out.path(dir + "diagnostics.txt"), r);
  });
  for (std::size_t k = 0; k < lams.size(); ++k) {
    const std::string dir = lambda_dir(k, lams.size());
    for (const char* f : {"S.csv", "R.csv", "S.bin", "R.bin", "diagnostics.txt"}) out.add(dir + f);
    print(reports[k]);
  }
  return 0;
}

double fd_residual(const WaveField& u, const SourceTerm& f) {
  const BoundaryGrid& g = u.grid;
  const double l2 = u.lambda * u.lambda;
  const Eigen::VectorXcd Pu = apply_operator(g, -l2, 1.0 - l2, u.values);
  const Eigen::VectorXcd fs = sample_on_grid(g, f);
  double num2 = 0.0, den2 = 0.0;
  for (int i = 1; i < g.n1(); ++i)
    for (int j = 1; j < g.n2(); ++j) {
      num2 += std::norm(Pu[g.index(i, j)] - fs[g.index(i, j)]);
      den2 += std::norm(fs[g.index(i, j)]);
    }
  return den2 > 0.0 ? std::sqrt(num2 / den2) : std::sqrt(num2);
}

int cmd_solve(const RunConfig& cfg, Manifest& out) {
  const Topography topo = cfg.topography();
  const SourceTerm f = cfg.source(topo);
  const auto lams = cfg.lambdas();
  const double a = cfg.number("stationary.x1_min"), b = cfg.number("stationary.x1_max");
  for (std::size_t k = 0; k < lams.size(); ++k) {
    const OutgoingResolvent R(Channel(topo, lams[k]), cfg.stationary());
    const OutgoingSolution s = R.solve(f, a, b);
    const BoundaryGrid grid(topo, a, b, cfg.integer("stationary.n1"), cfg.integer("stationary.n2"));
    const WaveField u = s.sample(grid, cfg.threads());
    const std::string dir = lambda_dir(k, lams.size());
    write_grid_file(out.path(dir + "field.grid"), u);
    write_form_file(out.path(dir + "v_L.csv"), s.v.v_L);
    write_form_file(out.path(dir + "v_R.csv"), s.v.v_R);
    write_form_file(out.path(dir + "transport_g.csv"), s.transport_g);
    const auto& d = s.diagnostics;
    Report r{{"lambda", num(lams[k])},
             {"source", f.describe()},
             {"transport_residual", num(d.transport_residual)},
             {"transport_residual_full", num(d.transport_residual_full)},
             {"outgoing_defect_L", num(d.outgoing_defect_L)},
             {"outgoing_defect_R", num(d.outgoing_defect_R)},
             {"mean_defect", num(d.mean_defect)},
             {"quadrature_defect", num(d.quadrature_defect)},
             {"omega_jump", num(d.omega_jump)},
             {"fd_residual", num(fd_residual(u, f))},
             {"field_h1_norm", num(h1_norm(grid, u.values))}};
    add_warnings(r, s.warnings);
    write_report(out.path(dir + "diagnostics.txt"), r);
    for (const char* n : {"field.grid", "v_L.csv", "v_R.csv", "transport_g.csv", "diagnostics.txt"})
      out.add(dir + n);
    print(r);
  }
  return 0;
}

int cmd_lap(const RunConfig& cfg, Manifest& out) {
  const Topography topo = cfg.topography();
  const ResolventProblem p = cfg.resolvent(topo);
  const auto eps = cfg.numbers("elliptic.eps_list");
  const OutgoingResolvent R(Channel(topo, p.lambda), cfg.stationary());
  const LapSweep s = lap_sweep(R, p, eps, cfg.cutoff(), cfg.threads());
  write_lap_csv(out.path("lap.csv"), s);
  bool decreasing = true;
  for (std::size_t k = 1; k < s.rows.size(); ++k)
    decreasing = decreasing && s.rows[k].h1_diff < s.rows[k - 1].h1_diff;
  Report r{{"lambda", num(p.lambda)},
           {"floor", num(s.floor)},
           {"reference_norm", num(s.reference_norm)},
           {"strictly_decreasing", decreasing ? "true" : "false"},
           {"final_over_floor", num(s.rows.back().h1_diff / s.floor)}};
  add_warnings(r, s.warnings);
  write_report(out.path("lap.txt"), r);
  out.add("lap.csv");
  out.add("lap.txt");
  print(r);
  return 0;
}

std::string snapshot_name(int step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshots/snap_%07d.grid", step);
  return buf;
}

int cmd_evolve(const RunConfig& cfg, Manifest& out) {
  const Topography topo = cfg.topography();
  const EvolutionConfig c = cfg.evolution(topo);
  const EvolutionTrace tr = evolve(topo, c);
  std::ofstream csv(out.path("trace.csv"));
  csv << "step,time,h1_norm\n";
  for (std::size_t s = 0; s < tr.times.size(); ++s) {
    WaveField w(tr.report_grid, c.lambda);
    w.values = tr.snapshots[s];
    const std::string name = snapshot_name(tr.steps[s]);
    write_grid_file(out.path(name), w,
                    {{"step", std::to_string(tr.steps[s])}, {"time", num(tr.times[s])}});
    out.add(name);
    csv << tr.steps[s] << ',' << num(tr.times[s]) << ',' << num(tr.h1_norms[s]) << '\n';
  }
  csv.close();
  out.add("trace.csv");
  const double T = tr.times.back();
  Report r{{"lambda", num(c.lambda)},
           {"T_final", num(T)},
           {"L_evo", num(tr.L_evo)},
           {"snapshots", std::to_string(tr.times.size())},
           {"h1_trend_last_half", num(norm_trend(tr, T / 2, T))}};
  write_report(out.path("evolve.txt"), r);
  out.add("evolve.txt");
  print(r);
  return 0;
}

int cmd_extract(const RunConfig& cfg, Manifest& out, const fs::path& trace_dir) {
  const Topography topo = cfg.topography();
  const EvolutionConfig c = cfg.evolution(topo);
  std::ifstream csv(trace_dir / "trace.csv");
  if (!csv) throw ConfigError("no trace.csv in " + trace_dir.string());
  std::string line;
  std::getline(csv, line);
  if (line != "step,time,h1_norm") throw ConfigError("trace.csv has an unexpected header");
  std::vector<std::pair<int, double>> rows;
  std::vector<double> norms;
  while (std::getline(csv, line)) {
    std::stringstream ss(line);
    std::string a, b, n;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, n, ',');
    rows.emplace_back(std::stoi(a), std::stod(b));
    norms.push_back(std::stod(n));
  }
  if (rows.size() < 2) throw WindowError("trace holds fewer than two snapshots");
  WaveField first = read_wave_field(trace_dir / snapshot_name(rows[0].first), topo);
  EvolutionTrace tr{first.grid, 0.0, c.dt, {}, {}, {}, norms, {}};
  for (const auto& [step, t] : rows) {
    const WaveField w = read_wave_field(trace_dir / snapshot_name(step), topo);
    tr.steps.push_back(step);
    tr.times.push_back(t);
    tr.snapshots.push_back(w.values);
  }
  const double T = tr.times.back();
  const double t0 = cfg.number("extract.window_begin") * T, t1 = cfg.number("extract.window_end") * T;
  const WaveField u = standing_wave_extract(tr, c.lambda, t0, t1);
  write_grid_file(out.path("extracted.grid"), u,
                  {{"window_begin", num(t0)}, {"window_end", num(t1)}});
  out.add("extracted.grid");
  Report r{{"lambda", num(c.lambda)},
           {"window_begin", num(t0)},
           {"window_end", num(t1)},
           {"h1_norm", num(h1_norm(u.grid, u.values))},
           {"h1_trend", num(norm_trend(tr, t0, t1))}};
  if (cfg.flag("extract.compare")) {
    const OutgoingResolvent R(Channel(topo, c.lambda), cfg.stationary());
    const OutgoingSolution s = R.solve(c.source, u.grid.x1_min(), u.grid.x1_max());
    WaveField ref = s.sample(u.grid, cfg.threads());
    ref.values = apply_cutoff(u.grid, ref.values, c.chi);
    write_grid_file(out.path("reference.grid"), ref);
    out.add("reference.grid");
    const double rn = h1_norm(u.grid, ref.values);
    const double diff = h1_norm(u.grid, u.values - ref.values);
    r.emplace_back("reference_h1_norm", num(rn));
    r.emplace_back("h1_relative_error", num(rn > 0.0 ? diff / rn : diff));
  }
  write_report(out.path("extract.txt"), r);
  out.add("extract.txt");
  print(r);
  return 0;
}

struct Failure {
  int code;
  std::string kind;
  std::string message;
};

Failure classify(const std::exception& e) {
  if (const auto* s = dynamic_cast<const SupercriticalError*>(&e)) return {2, s->kind(), e.what()};
  if (const auto* s = dynamic_cast<const IllConditionedError*>(&e)) return {3, s->kind(), e.what()};
  if (const auto* s = dynamic_cast<const Error*>(&e)) {
    const bool usage = s->kind() == "ConfigError" || s->kind() == "DomainError";
    return {usage ? 1 : 4, s->kind(), e.what()};
  }
  return {5, "InternalError", e.what()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Internal-wave scattering in subcritical channels"};
  std::string config_path, out_dir = "out", trace_dir;
  int threads = 0;
  long long seed = -1;
  app.add_option("--config", config_path, "INI run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads (overrides run.threads)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "random seed (overrides run.seed)")->check(CLI::NonNegativeNumber);
  app.require_subcommand(1);
  app.add_subcommand("check", "subcriticality and fundamental intervals");
  app.add_subcommand("billiard", "tabulate the billiard map and the circle map");
  app.add_subcommand("scatter", "scattering matrix and smoothing remainder");
  app.add_subcommand("solve", "outgoing resolvent R(lambda) f");
  app.add_subcommand("lap", "limiting absorption sweep against the elliptic oracle");
  app.add_subcommand("evolve", "forced time evolution");
  auto* extract = app.add_subcommand("extract", "demodulate an evolution trace");
  extract->add_option("--trace", trace_dir, "directory written by evolve (default: --out)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::load(config_path);
    if (threads > 0) cfg.set("run.threads", std::to_string(threads));
    if (seed >= 0) cfg.set("run.seed", std::to_string(seed));
    cfg.validate(command);
    Manifest out(out_dir, cfg.hash());
    fs::remove(out.path("error.json"));
    {
      std::ofstream os(out.path("config." + command + ".ini"));
      os << cfg.canonical();
    }
    out.add("config." + command + ".ini");
    int code = 0;
    if (command == "check") code = cmd_check(cfg, out);
    if (command == "billiard") code = cmd_billiard(cfg, out);
    if (command == "scatter") code = cmd_scatter(cfg, out);
    if (command == "solve") code = cmd_solve(cfg, out);
    if (command == "lap") code = cmd_lap(cfg, out);
    if (command == "evolve") code = cmd_evolve(cfg, out);
    if (command == "extract") code = cmd_extract(cfg, out, trace_dir.empty() ? out_dir : trace_dir);
    out.write("manifest." + command + ".txt");
    return code;
  } catch (const std::exception& e) {
    const Failure f = classify(e);
    const nlohmann::json report = {
        {"command", command}, {"error", f.kind}, {"message", f.message}, {"exit_code", f.code}};
    std::cerr << report.dump() << '\n';
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!ec) std::ofstream(fs::path(out_dir) / "error.json") << report.dump(2) << '\n';
    return f.code;
  }
}
