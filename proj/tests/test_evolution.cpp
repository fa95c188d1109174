#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subwave/evolution.hpp"

using namespace subwave;

namespace {
constexpr double kPi = std::numbers::pi;
const double kLambda = 1.0 / std::sqrt(2.0);

EvolutionConfig small_config(const SourceTerm& f, double T) {
  EvolutionConfig c;
  c.lambda = kLambda;
  c.T_final = T;
  c.h1 = 0.2;
  c.n2 = 12;
  c.L_report = 4.0;
  c.chi = Cutoff{3.0, 4.0, 0.0};
  c.snapshot_stride = 1;
  c.source = f;
  return c;
}
}  // namespace

TEST_CASE("group speed constant") {
  double best = 0.0;
  for (double k1 = 0.0; k1 < 5.0; k1 += 1e-5)
    best = std::max(best, k1 / std::pow(k1 * k1 + 1.0, 1.5));
  CHECK(best == doctest::Approx(kMaxGroupSpeed).epsilon(1e-9));
  CHECK(kMaxGroupSpeed == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-15));
}

TEST_CASE("Dirichlet Laplacian solve inverts apply") {
  const BoundaryGrid g(Topography::gaussian_bump(0.5), -6.0, 6.0, 60, 10);
  const DirichletLaplacian lap(g);
  Eigen::VectorXcd w(lap.layout().unknowns());
  for (int k = 0; k < w.size(); ++k) w[k] = Complex(std::sin(0.3 * k), std::cos(0.11 * k * k));
  const Eigen::VectorXcd u = lap.solve(w);
  CHECK((lap.apply(u) - w).norm() < 1e-10 * w.norm());
  CHECK((lap.restrict(lap.extend(w)) - w).norm() == 0.0);
}

TEST_CASE("Dirichlet Laplacian on a flat box: separable inverse and symmetry") {
  const double L = 3.0;
  const auto err = [&](int n) {
    const BoundaryGrid g(Topography::flat(), -L, L, 4 * n, n);
    const DirichletLaplacian lap(g);
    const auto phi = [&](double x1, double x2) {
      return Complex(std::sin(kPi * (x1 + L) / (2 * L)) * std::sin(x2));
    };
    const Eigen::VectorXcd rhs = lap.restrict(sample_on_grid(g, phi));
    const double eig = -(1.0 + std::pow(kPi / (2 * L), 2));
    return (lap.solve(rhs) - rhs / eig).cwiseAbs().maxCoeff();
  };
  const double e1 = err(16), e2 = err(32);
  CHECK(e2 < 2e-3);
  CHECK(e1 / e2 > 3.5);

  const BoundaryGrid g(Topography::gaussian_bump(0.5), -6.0, 6.0, 48, 10);
  const DirichletLaplacian lap(g);
  Eigen::VectorXcd a(lap.layout().unknowns()), b(a.size());
  for (int k = 0; k < a.size(); ++k) {
    a[k] = Complex(std::cos(0.7 * k), 0.2 * k / a.size());
    b[k] = Complex(std::sin(1.3 * k * k), -1.0);
  }
  const auto inner = [&](const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
    return x.dot(lap.weights().cast<Complex>().cwiseProduct(y));
  };
  const Complex ab = inner(lap.solve(a), b), ba = inner(a, lap.solve(b));
  CHECK(std::abs(ab - ba) < 1e-10 * std::abs(ab));
}

TEST_CASE("separable eigenfunction follows the scalar leapfrog recursion") {
  const double L = 20.0, h = 0.2, dt = 0.25;
  const int n1 = 200, n2 = 12;
  const SourceBox box{-L, L, -kPi, 0.0};
  const auto phi = [=](double x1, double x2) -> Complex {
    if (x1 < -L || x1 > L || x2 < -kPi || x2 > 0.0) return 0.0;
    return std::sin(kPi * (x1 + L) / (2 * L)) * std::sin(x2);
  };
  EvolutionConfig c = small_config(SourceTerm::custom(phi, box), 30.0);
  c.L_evo = L;
  c.chi = Cutoff{4.0, 4.0, 0.0};
  const EvolutionTrace tr = evolve(Topography::flat(), c);
  CHECK(tr.L_evo == doctest::Approx(L));

  const double hs = 1.0 / n2;
  const double mu1 = -4.0 / (h * h) * std::pow(std::sin(kPi / (2.0 * n1)), 2);
  const double mu2 = -4.0 / (hs * hs * kPi * kPi) * std::pow(std::sin(kPi * hs / 2), 2);
  const double p = mu2 / (mu1 + mu2);
  std::vector<double> a{0.0, 0.5 * dt * dt};
  while (a.size() < tr.steps.size() + 2) {
    const std::size_t n = a.size() - 1;
    a.push_back(2 * a[n] - a[n - 1] + dt * dt * (-p * a[n] + std::cos(kLambda * n * dt)));
  }
  const BoundaryGrid& rg = tr.report_grid;
  double worst = 0.0, scale = 0.0;
  for (std::size_t s = 0; s < tr.steps.size(); ++s) {
    const double amp = a[tr.steps[s]] / (mu1 + mu2);
    for (int i = 0; i <= rg.n1(); ++i)
      for (int j = 0; j <= n2; ++j) {
        const double x1 = rg.x1(i);
        const Complex exact = amp * c.chi(x1) * phi(x1, rg.x2(i, j));
        worst = std::max(worst, std::abs(tr.snapshots[s][rg.index(i, j)] - exact));
        scale = std::max(scale, std::abs(exact));
      }
  }
  CHECK(scale > 0.0);
  CHECK(worst < 1e-10 * scale);
}

TEST_CASE("even data on an even channel stays even") {
  const EvolutionTrace tr =
      evolve(Topography::gaussian_bump(0.5), small_config(SourceTerm::bump(0.0, -1.0, 1.0, 0.5), 20.0));
  const BoundaryGrid& g = tr.report_grid;
  double worst = 0.0, scale = 0.0;
  for (const auto& s : tr.snapshots)
    for (int i = 0; i <= g.n1(); ++i)
      for (int j = 0; j <= g.n2(); ++j) {
        worst = std::max(worst, std::abs(s[g.index(i, j)] - s[g.index(g.n1() - i, j)]));
        scale = std::max(scale, std::abs(s[g.index(i, j)]));
      }
  CHECK(scale > 0.0);
  CHECK(worst < 1e-12 * scale);
}

TEST_CASE("zero forcing and the first step") {
  const Topography topo = Topography::gaussian_bump(0.5);
  const EvolutionTrace z = evolve(topo, small_config(SourceTerm::zero(), 10.0));
  for (const auto& s : z.snapshots) CHECK(s.norm() == 0.0);

  const SourceTerm f = SourceTerm::bump(0.5, -1.2, 1.0, 0.5, Complex(1.0, -0.5));
  EvolutionConfig c = small_config(f, 2.0);
  const EvolutionTrace tr = evolve(topo, c);
  REQUIRE(tr.steps[1] == 1);
  const int half = int(std::lround(tr.L_evo / 0.2));
  const BoundaryGrid grid(topo, -tr.L_evo, tr.L_evo, 2 * half, c.n2);
  const DirichletLaplacian lap(grid);
  const Eigen::VectorXcd u1 =
      lap.extend(lap.solve(0.5 * c.dt * c.dt * lap.restrict(sample_on_grid(grid, f))));
  const BoundaryGrid& rg = tr.report_grid;
  const int off = half - rg.n1() / 2;
  double worst = 0.0;
  for (int i = 0; i <= rg.n1(); ++i)
    for (int j = 0; j <= rg.n2(); ++j)
      worst = std::max(worst, std::abs(tr.snapshots[1][rg.index(i, j)] -
                                       c.chi(rg.x1(i)) * u1[grid.index(i + off, j)]));
  CHECK(worst < 1e-14);
}

TEST_CASE("energy is conserved once the forcing stops") {
  EvolutionConfig c = small_config(SourceTerm::bump(0.3, -1.0, 1.0, 0.5), 30.0);
  c.forcing_off = 10.0;
  const EvolutionTrace tr = evolve(Topography::gaussian_bump(0.5), c);
  double lo = 1e300, hi = 0.0;
  for (std::size_t s = 0; s < tr.times.size(); ++s)
    if (tr.times[s] > 10.5) {
      lo = std::min(lo, tr.energy[s]);
      hi = std::max(hi, tr.energy[s]);
    }
  CHECK(lo > 0.0);
  CHECK((hi - lo) / hi < 1e-10);
}

TEST_CASE("demodulation picks the e^{i lambda t} component") {
  EvolutionTrace tr{BoundaryGrid(Topography::flat(), -1.0, 1.0, 4, 4), 2.0, 0.25, {}, {}, {}, {},
                    {}};
  const double period = 2 * kPi / kLambda;
  const int per = 32;
  const double dt = period / per;
  Eigen::VectorXcd a(tr.report_grid.size()), b(tr.report_grid.size());
  for (int k = 0; k < a.size(); ++k) {
    a[k] = Complex(k, 1.0);
    b[k] = Complex(-0.5, 2.0 * k);
  }
  for (int n = 0; n <= 10 * per; ++n) {
    const double t = n * dt;
    tr.steps.push_back(n);
    tr.times.push_back(t);
    tr.snapshots.push_back(std::polar(1.0, kLambda * t) * a + std::polar(1.0, -kLambda * t) * b +
                           Eigen::VectorXcd::Constant(a.size(), 0.3));
    tr.h1_norms.push_back(1.0 + 0.01 * t);
  }
  // Window of exactly four periods (4 * per snapshots).
  const WaveField u = standing_wave_extract(tr, kLambda, 2 * period, 6 * period - 0.5 * dt);
  CHECK((u.values - 2.0 * a).norm() < 1e-12 * a.norm());
  CHECK(norm_trend(tr, 0.0, tr.times.back()) == doctest::Approx(0.01));
  CHECK_THROWS_AS(standing_wave_extract(tr, kLambda, 0.0, tr.times.back() + 1.0), WindowError);
  CHECK_THROWS_AS(standing_wave_extract(tr, 3.0 * kLambda, 0.0, 10.0), WindowError);
}

TEST_CASE("evolution refusals and guards") {
  const Topography topo = Topography::gaussian_bump(0.5);
  EvolutionConfig c = small_config(SourceTerm::bump(0.0, -1.0, 1.0, 0.5), 10.0);
  SUBCASE("time step") {
    c.dt = 0.6;
    CHECK_THROWS_AS(evolve(topo, c), DomainError);
  }
  SUBCASE("domain too short for the group speed") {
    c.L_evo = c.L_report + 2.0;
    CHECK_THROWS_AS(evolve(topo, c), DomainError);
  }
  SUBCASE("cutoff past the report window") {
    c.chi = Cutoff{4.0, 5.0, 0.0};
    CHECK_THROWS_AS(evolve(topo, c), DomainError);
  }
  SUBCASE("supercritical") {
    CHECK_THROWS_AS(evolve(Topography::gaussian_bump(2.0), c), SupercriticalError);
  }
  SUBCASE("growth bound") {
    c.stability_factor = 1e-3;
    CHECK_THROWS_AS(evolve(topo, c), StabilityError);
  }
}

TEST_CASE("walls are far enough: enlarging the domain leaves the window unchanged") {
  const Topography topo = Topography::gaussian_bump(0.5);
  EvolutionConfig c = small_config(SourceTerm::bump(0.5, -1.0, 1.0, 0.5), 40.0);
  const EvolutionTrace a = evolve(topo, c);
  c.L_evo = 1.25 * a.L_evo;
  const EvolutionTrace b = evolve(topo, c);
  const WaveField ua = standing_wave_extract(a, kLambda, 20.0, 40.0);
  const WaveField ub = standing_wave_extract(b, kLambda, 20.0, 40.0);
  CHECK(h1_norm(a.report_grid, ua.values - ub.values) < 1e-4 * h1_norm(a.report_grid, ua.values));
}
