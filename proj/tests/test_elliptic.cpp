#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subwave/elliptic.hpp"

using namespace subwave;

namespace {
constexpr double kPi = std::numbers::pi;
const double kLambda = 1.0 / std::sqrt(2.0);

ResolventProblem flat_problem(double eps, double L, int n1, int n2) {
  ResolventProblem p;
  p.lambda = kLambda;
  p.epsilon = eps;
  p.L = L;
  p.n1 = n1;
  p.n2 = n2;
  p.source = SourceTerm::mode();
  return p;
}
}  // namespace

TEST_CASE("complex slope selects decaying modes") {
  for (double eps : {0.2, 0.05, 0.01}) {
    const Complex c = complex_slope(kLambda, eps);
    CHECK(c.imag() > 0.0);
    CHECK(c.real() > 0.0);
    const Complex w(kLambda, -eps);
    CHECK(std::abs(c * c * w * w - (1.0 - w * w)) < 1e-12);
  }
  const Complex w(kLambda, -0.05);
  const Eigen::VectorXcd z = face_decay_factors(-w * w, 1.0 - w * w, 0.05, 16);
  CHECK(z.cwiseAbs().maxCoeff() < 1.0);
}

TEST_CASE("flat channel single mode matches the 1D discrete oracle") {
  const double eps = 0.1, L = 6.0;
  const int n1 = 240, n2 = 16;
  const ResolventProblem p = flat_problem(eps, L, n1, n2);
  const ResolventSolution sol = solve_resolvent(Topography::flat(), p);
  CHECK(sol.residual < 1e-12);

  // Dense 1D solve of a1 (w_{i+1} - 2 w_i + w_{i-1}) / h^2 + a2 mu / pi^2 w_i = chi_i
  // with the decaying flat-end recurrence w_{-1} = z w_0, w_{n1+1} = z w_{n1}.
  const Complex om(kLambda, -eps);
  const Complex a1 = -om * om, a2 = 1.0 - om * om;
  const double h = 2 * L / n1, hs = 1.0 / n2;
  const double mu = -4.0 / (hs * hs) * std::pow(std::sin(kPi * hs / 2), 2) / (kPi * kPi);
  const Complex s = 2.0 - h * h * a2 * mu / a1;
  Complex z = 0.5 * (s - std::sqrt(s * s - 4.0));
  if (std::abs(z) > 1.0) z = 1.0 / z;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n1 + 1, n1 + 1);
  Eigen::VectorXcd rhs(n1 + 1);
  for (int i = 0; i <= n1; ++i) {
    M(i, i) = -2.0 * a1 / (h * h) + a2 * mu;
    if (i > 0) M(i, i - 1) = a1 / (h * h);
    if (i < n1) M(i, i + 1) = a1 / (h * h);
    const double x = -L + h * i, t = 1.0 - x * x;
    rhs[i] = t > 0.0 ? std::pow(t, 8) : 0.0;
  }
  M(0, 0) += a1 / (h * h) * z;
  M(n1, n1) += a1 / (h * h) * z;
  const Eigen::VectorXcd w = M.partialPivLu().solve(rhs);
  const BoundaryGrid& g = sol.field.grid;
  Eigen::VectorXcd exact(g.size());
  for (int i = 0; i <= n1; ++i)
    for (int j = 0; j <= n2; ++j) exact[g.index(i, j)] = w[i] * std::sin(g.x2(i, j));
  CHECK(l2_norm(g, sol.field.values - exact) / l2_norm(g, exact) < 1e-6);
}

TEST_CASE("radiation closure is exact for flat channels") {
  const ResolventSolution a = solve_resolvent(Topography::flat(), flat_problem(0.1, 6.0, 120, 12));
  const ResolventSolution b = solve_resolvent(Topography::flat(), flat_problem(0.1, 12.0, 240, 12));
  double worst = 0.0, scale = 0.0;
  for (int i = 30; i <= 90; ++i)
    for (int j = 0; j <= 12; ++j) {
      worst = std::max(worst, std::abs(a.field.at(i, j) - b.field.at(i + 60, j)));
      scale = std::max(scale, std::abs(a.field.at(i, j)));
    }
  CHECK(worst < 1e-8 * scale);
}

TEST_CASE("resolvent problem checks") {
  const Topography topo = Topography::gaussian_bump(0.5);
  ResolventProblem p;
  p.lambda = kLambda;
  p.n1 = 160;
  p.n2 = 16;
  SUBCASE("zero source") {
    const ResolventSolution s = solve_resolvent(topo, p);
    CHECK(s.field.values.norm() == 0.0);
  }
  SUBCASE("gaussian residual") {
    p.source = SourceTerm::random(topo, 2, 3);
    const ResolventSolution s = solve_resolvent(topo, p);
    CHECK(s.residual < 1e-10);
    double wall = 0.0;
    for (int i = 0; i <= p.n1; ++i)
      wall = std::max({wall, std::abs(s.field.at(i, 0)), std::abs(s.field.at(i, p.n2))});
    CHECK(wall == 0.0);
  }
  SUBCASE("refusals") {
    p.epsilon = 0.005;
    CHECK_THROWS_AS(solve_resolvent(topo, p), DomainError);
    p.epsilon = 0.1;
    p.L = topo.support_radius() + 1.0;
    CHECK_THROWS_AS(solve_resolvent(topo, p), DomainError);
    p.L = 0.0;
    CHECK_THROWS_AS(solve_resolvent(Topography::gaussian_bump(2.0), p), SupercriticalError);
  }
  SUBCASE("refinement warning on an underresolved grid") {
    p.n1 = 40;
    p.source = SourceTerm::random(topo, 2, 3);
    p.check_refinement = true;
    const ResolventSolution s = solve_resolvent(topo, p);
    REQUIRE(s.warnings.size() == 1);
    CHECK(s.warnings[0].kind == "RefinementWarning");
  }
}

TEST_CASE("limiting absorption sweeps") {
  StationaryOptions o;
  o.K = 64;
  ResolventProblem p;
  p.n1 = 256;
  p.n2 = 32;
  SUBCASE("flat single mode: error decreases with eps") {
    const OutgoingResolvent R(Channel(Topography::flat(), kLambda), o);
    p.source = SourceTerm::mode();
    const LapSweep s = lap_sweep(R, p, {0.2, 0.1, 0.05}, Cutoff{});
    REQUIRE(s.rows.size() == 3);
    CHECK(s.rows[1].h1_diff < s.rows[0].h1_diff);
    CHECK(s.rows[2].h1_diff < s.rows[1].h1_diff);
    CHECK(s.floor > 0.0);
    // Resolvent bound sanity: eps ||u_eps|| does not grow.
    CHECK(s.rows[2].epsilon * s.rows[2].h1_norm <= s.rows[0].epsilon * s.rows[0].h1_norm);
  }
  SUBCASE("zero source") {
    const OutgoingResolvent R(Channel(Topography::gaussian_bump(0.5), kLambda), o);
    const LapSweep s = lap_sweep(R, p, {0.2, 0.1}, Cutoff{});
    for (const auto& r : s.rows) CHECK(r.h1_diff == 0.0);
  }
  SUBCASE("eps list must decrease") {
    const OutgoingResolvent R(Channel(Topography::flat(), kLambda), o);
    CHECK_THROWS_AS(lap_sweep(R, p, {0.1, 0.2}, Cutoff{}), DomainError);
  }
}
