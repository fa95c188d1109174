#include "subwave/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "subwave/io.hpp"

namespace subwave {

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"run.lambda", "0.70710678118654757"},
      {"run.seed", "7"},
      {"run.threads", "1"},
      {"topography.kind", "gaussian"},
      {"topography.amplitude", "0.5"},
      {"topography.width", "1"},
      {"topography.center", "0"},
      {"topography.knots", ""},
      {"topography.values", ""},
      {"scattering.K", "256"},
      {"scattering.n_quad", "0"},
      {"scattering.cond_cap", "1e8"},
      {"scattering.trials", "100"},
      {"scattering.compare_K", "0"},
      {"source.kind", "random"},
      {"source.count", "2"},
      {"source.reach", "2"},
      {"source.seed", ""},
      {"source.k", "1"},
      {"source.radius", "1"},
      {"source.amplitude_re", "1"},
      {"source.amplitude_im", "0"},
      {"source.p", "0"},
      {"source.q", "-1"},
      {"source.r1", "1"},
      {"source.r2", "0.5"},
      {"stationary.quad_order", "32"},
      {"stationary.quad_tolerance", "1e-9"},
      {"stationary.continuity_tolerance", "1e-8"},
      {"stationary.mean_tolerance", "1e-8"},
      {"stationary.x1_min", "-6"},
      {"stationary.x1_max", "6"},
      {"stationary.n1", "512"},
      {"stationary.n2", "64"},
      {"cutoff.inner", "3"},
      {"cutoff.outer", "4"},
      {"cutoff.center", "0"},
      {"elliptic.L", "0"},
      {"elliptic.n1", "1024"},
      {"elliptic.n2", "128"},
      {"elliptic.epsilon", "0.1"},
      {"elliptic.eps_list", "0.2,0.1,0.05,0.025"},
      {"elliptic.min_epsilon", "0.01"},
      {"elliptic.check_refinement", "false"},
      {"elliptic.refinement_tolerance", "1e-3"},
      {"evolution.T_final", "400"},
      {"evolution.dt", "0.25"},
      {"evolution.L_evo", "0"},
      {"evolution.L_report", "4"},
      {"evolution.h1", "0.1"},
      {"evolution.n2", "32"},
      {"evolution.stride", "2"},
      {"evolution.stability_factor", "10"},
      {"extract.window_begin", "0.5"},
      {"extract.window_end", "1"},
      {"extract.compare", "true"},
      {"billiard.samples", "1000"},
      {"billiard.x1_min", "0"},
      {"billiard.x1_max", "0"},
  };
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

RunConfig::RunConfig() : values_(defaults()) {}

RunConfig RunConfig::parse(std::istream& is) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, node] : body) cfg.set(section + "." + key, node.data());
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  return parse(is);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second = trim(value);
}

const std::string& RunConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << '=' << v << '\n';
  return os.str();
}

std::string RunConfig::hash() const { return sha256_hex(canonical()); }

double RunConfig::number(const std::string& key) const {
  const std::string& s = raw(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + " = '" + s + "' is not a finite number");
}

int RunConfig::integer(const std::string& key) const {
  const std::string& s = raw(key);
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used == s.size() && v >= -(1L << 30) && v <= (1L << 30)) return int(v);
  } catch (const std::exception&) {
  }
  throw ConfigError(key + " = '" + s + "' is not an integer");
}

bool RunConfig::flag(const std::string& key) const {
  const std::string& s = raw(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + " = '" + s + "' is not a boolean");
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(raw(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument("");
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError(key + " has a non-numeric entry '" + item + "'");
    }
  }
  return out;
}

namespace {
void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}
}  // namespace

Topography RunConfig::topography() const {
  const std::string& kind = raw("topography.kind");
  if (kind == "flat") return Topography::flat();
  if (kind == "gaussian")
    return Topography::gaussian_bump(number("topography.amplitude"), number("topography.width"),
                                     number("topography.center"));
  if (kind == "spline") {
    const auto knots = numbers("topography.knots"), vals = numbers("topography.values");
    require(knots.size() == vals.size() && knots.size() >= 2,
            "topography.knots and topography.values need equal length >= 2");
    return Topography::spline(knots, vals);
  }
  throw ConfigError("topography.kind must be flat, gaussian or spline");
}

std::vector<double> RunConfig::lambdas() const {
  const auto l = numbers("run.lambda");
  require(!l.empty(), "run.lambda is empty");
  for (double v : l)
    if (!(v > 0.0 && v < 1.0)) throw DomainError("lambda = " + format_double(v) + " outside (0, 1)");
  return l;
}

double RunConfig::lambda() const { return lambdas().front(); }

std::uint64_t RunConfig::seed() const {
  const int s = integer("run.seed");
  require(s >= 0, "run.seed must be nonnegative");
  return std::uint64_t(s);
}

int RunConfig::threads() const {
  const int t = integer("run.threads");
  require(t >= 1, "run.threads must be at least 1");
  return t;
}

ScatteringOptions RunConfig::scattering() const {
  ScatteringOptions o;
  o.K = integer("scattering.K");
  o.n_quad = integer("scattering.n_quad");
  o.cond_cap = number("scattering.cond_cap");
  require(o.K >= 4, "scattering.K must be at least 4");
  require(o.n_quad == 0 || o.n_quad >= 2 * o.K + 2, "scattering.n_quad must be 0 or >= 2K + 2");
  require(o.cond_cap > 1.0, "scattering.cond_cap must exceed 1");
  require(integer("scattering.trials") >= 1, "scattering.trials must be positive");
  const int cK = integer("scattering.compare_K");
  require(cK == 0 || cK >= 4, "scattering.compare_K must be 0 or >= 4");
  return o;
}

StationaryOptions RunConfig::stationary() const {
  StationaryOptions o;
  o.K = scattering().K;
  o.quad_order = integer("stationary.quad_order");
  o.quad_tolerance = number("stationary.quad_tolerance");
  o.continuity_tolerance = number("stationary.continuity_tolerance");
  o.mean_tolerance = number("stationary.mean_tolerance");
  o.cond_cap = scattering().cond_cap;
  o.threads = threads();
  require(o.quad_order >= 4, "stationary.quad_order must be at least 4");
  require(o.quad_tolerance > 0 && o.continuity_tolerance > 0 && o.mean_tolerance > 0,
          "stationary tolerances must be positive");
  require(number("stationary.x1_max") > number("stationary.x1_min"),
          "stationary.x1_max must exceed stationary.x1_min");
  require(integer("stationary.n1") >= 2 && integer("stationary.n2") >= 6,
          "stationary grid needs n1 >= 2 and n2 >= 6");
  return o;
}

SourceTerm RunConfig::source(const Topography& topo) const {
  const std::string& kind = raw("source.kind");
  const Complex amp(number("source.amplitude_re"), number("source.amplitude_im"));
  SourceTerm f;
  if (kind == "zero") {
    f = SourceTerm::zero();
  } else if (kind == "mode") {
    f = SourceTerm::mode(integer("source.k"), number("source.radius"), amp);
  } else if (kind == "bump") {
    f = SourceTerm::bump(number("source.p"), number("source.q"), number("source.r1"),
                         number("source.r2"), amp);
  } else if (kind == "random") {
    const int count = integer("source.count");
    require(count >= 1, "source.count must be positive");
    const std::string& s = raw("source.seed");
    const std::uint64_t seed = s.empty() ? this->seed() : std::uint64_t(integer("source.seed"));
    f = SourceTerm::random(topo, count, seed, number("source.reach"));
  } else {
    throw ConfigError("source.kind must be zero, mode, bump or random");
  }
  if (kind != "mode") check_source_support(f, topo);
  return f;
}

Cutoff RunConfig::cutoff() const {
  const Cutoff chi{number("cutoff.inner"), number("cutoff.outer"), number("cutoff.center")};
  require(chi.inner >= 0.0 && chi.outer > chi.inner, "cutoff needs 0 <= inner < outer");
  return chi;
}

ResolventProblem RunConfig::resolvent(const Topography& topo) const {
  ResolventProblem p;
  p.lambda = lambda();
  p.epsilon = number("elliptic.epsilon");
  p.L = number("elliptic.L");
  p.n1 = integer("elliptic.n1");
  p.n2 = integer("elliptic.n2");
  p.min_epsilon = number("elliptic.min_epsilon");
  p.check_refinement = flag("elliptic.check_refinement");
  p.refinement_tolerance = number("elliptic.refinement_tolerance");
  require(p.n1 >= 4 && p.n2 >= 4, "elliptic grid needs n1, n2 >= 4");
  require(p.L == 0.0 || p.L > topo.support_radius() + 2.0,
          "elliptic.L must be 0 or exceed R0 + 2");
  const auto eps = numbers("elliptic.eps_list");
  require(!eps.empty(), "elliptic.eps_list is empty");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    require(eps[k] >= p.min_epsilon, "elliptic.eps_list entries must be >= min_epsilon");
    require(k == 0 || eps[k] < eps[k - 1], "elliptic.eps_list must be strictly decreasing");
  }
  p.source = source(topo);
  return p;
}

EvolutionConfig RunConfig::evolution(const Topography& topo) const {
  EvolutionConfig c;
  c.lambda = lambda();
  c.T_final = number("evolution.T_final");
  c.dt = number("evolution.dt");
  c.L_evo = number("evolution.L_evo");
  c.L_report = number("evolution.L_report");
  c.h1 = number("evolution.h1");
  c.n2 = integer("evolution.n2");
  c.snapshot_stride = integer("evolution.stride");
  c.stability_factor = number("evolution.stability_factor");
  c.source = source(topo);
  c.chi = cutoff();
  require(c.T_final > 0.0, "evolution.T_final must be positive");
  if (!(c.dt > 0.0 && c.dt <= 0.5)) throw DomainError("evolution.dt must lie in (0, 0.5]");
  require(c.h1 > 0.0 && c.n2 >= 2 && c.snapshot_stride >= 1, "invalid evolution grid or stride");
  require(c.L_report > 0.0, "evolution.L_report must be positive");
  const double needed = c.L_report + kMaxGroupSpeed * c.T_final + 2.0;
  if (c.L_evo != 0.0 && c.L_evo < needed)
    throw DomainError("evolution.L_evo must be 0 or at least " + format_double(needed));
  require(std::abs(c.chi.center) + c.chi.outer <= c.L_report,
          "cutoff must vanish on |x1| >= evolution.L_report");
  const double wb = number("extract.window_begin"), we = number("extract.window_end");
  require(0.0 <= wb && wb < we && we <= 1.0, "extract window needs 0 <= begin < end <= 1");
  return c;
}

void RunConfig::validate(const std::string& command) const {
  const auto uses = [&](std::initializer_list<const char*> names) {
    if (command.empty()) return true;
    for (const char* n : names)
      if (command == n) return true;
    return false;
  };
  if (!command.empty() &&
      !uses({"check", "billiard", "scatter", "solve", "lap", "evolve", "extract"}))
    throw ConfigError("unknown command '" + command + "'");
  const Topography topo = topography();
  lambdas();
  seed();
  threads();
  if (uses({"scatter", "solve", "lap", "extract"})) scattering();
  if (uses({"solve", "lap", "extract"})) stationary();
  if (uses({"solve"})) source(topo);
  if (uses({"lap"})) resolvent(topo);
  if (uses({"evolve", "extract"})) evolution(topo);
  if (uses({"billiard"})) {
    require(integer("billiard.samples") >= 2, "billiard.samples must be at least 2");
    require(number("billiard.x1_min") <= number("billiard.x1_max"),
            "billiard.x1_min must not exceed billiard.x1_max");
  }
}

}  // namespace subwave
