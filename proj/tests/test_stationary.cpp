#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "subwave/stationary.hpp"

using namespace subwave;

namespace {
constexpr double kPi = std::numbers::pi;
const double kLambda = 1.0 / std::sqrt(2.0);

double envelope(double t) {
  const double s = 1.0 - t * t;
  return s > 0.0 ? std::pow(s, 8) : 0.0;
}

const OutgoingResolvent& gaussian_resolvent() {
  static const OutgoingResolvent r(Channel(Topography::gaussian_bump(0.5), kLambda),
                                   [] {
                                     StationaryOptions o;
                                     o.K = 128;
                                     return o;
                                   }());
  return r;
}

const OutgoingResolvent& flat_resolvent() {
  static const OutgoingResolvent r(Channel(Topography::flat(), kLambda), [] {
    StationaryOptions o;
    o.K = 64;
    return o;
  }());
  return r;
}
}  // namespace

TEST_CASE("incident field") {
  const ChannelParams p = check_subcritical(Topography::flat(), kLambda);
  SUBCASE("zero source") {
    IncidentField U0(SourceTerm::zero(), p);
    CHECK(U0(0.3, -1.0) == Complex(0.0));
    CHECK(U0.trace(0.3) == Complex(0.0));
  }
  SUBCASE("separable source in characteristic coordinates") {
    // f = a(y+) b(y-) with y+- = x1 +- x2/c; the cone below x is
    // {y+' <= y+, y-' >= y-} and dx1 dx2 = (c/2) dy+ dy-.
    const double c = p.c;
    const auto a = [](double y) { return envelope((y + 1.0) / 0.8); };
    const auto b = [](double y) { return envelope((y - 0.5) / 0.7); };
    SourceBox box{(-1.8 - 0.2) / 2, (-0.2 + 1.2) / 2, c * (-1.8 - 1.2) / 2, c * (-0.2 + 0.2) / 2};
    auto f = SourceTerm::custom(
        [&](double x1, double x2) { return Complex(a(x1 + x2 / c) * b(x1 - x2 / c)); }, box);
    IncidentField U0(f, p, 64);
    const double kappa = 1.0 / (2.0 * kLambda * std::sqrt(1.0 - kLambda * kLambda));
    using boost::math::quadrature::gauss_kronrod;
    for (auto [x1, x2] : {std::pair{0.0, -0.5}, std::pair{-0.4, -1.1}, std::pair{0.7, -0.1},
                          std::pair{-1.2, -2.5}}) {
      const double yp = x1 + x2 / c, ym = x1 - x2 / c;
      const double A = gauss_kronrod<double, 61>::integrate(a, -1.8, std::max(-1.8, yp), 8, 1e-15);
      const double B = gauss_kronrod<double, 61>::integrate(b, std::min(1.2, ym), 1.2, 8, 1e-15);
      CHECK(std::abs(U0(x1, x2) - kappa * c / 2 * A * B) < 1e-10);
    }
  }
  SUBCASE("P(lambda) U0 = f by finite differences") {
    const Topography topo = Topography::gaussian_bump(0.5);
    const ChannelParams pg = check_subcritical(topo, kLambda);
    const SourceTerm f = SourceTerm::bump(0.3, -1.5, 0.9, 0.6, Complex(1.0, -0.5));
    IncidentField U0(f, pg);
    const double l2 = kLambda * kLambda;
    double err[2];
    for (int r = 0; r < 2; ++r) {
      BoundaryGrid g(topo, -2.0, 2.0, 80 << r, 32 << r);
      const Eigen::VectorXcd u = sample_on_grid(g, [&](double x1, double x2) { return U0(x1, x2); });
      const Eigen::VectorXcd Pu = apply_operator(g, -l2, 1.0 - l2, u);
      const Eigen::VectorXcd fs = sample_on_grid(g, f);
      double worst = 0.0;
      for (int i = 1; i < g.n1(); ++i)
        for (int j = 1; j < g.n2(); ++j)
          worst = std::max(worst, std::abs(Pu[g.index(i, j)] - fs[g.index(i, j)]));
      err[r] = worst;
    }
    CHECK(err[1] < 1e-2);
    CHECK(err[0] / err[1] > 3.0);
  }
  SUBCASE("trace derivative matches differences") {
    const Topography topo = Topography::gaussian_bump(0.5);
    IncidentField U0(SourceTerm::random(topo, 3, 11), check_subcritical(topo, kLambda));
    for (double t : {-2.0, 0.1, 1.7, 3.0}) {
      const double h = 1e-5;
      const Complex fd = (U0.trace(t + h) - U0.trace(t - h)) / (2 * h);
      CHECK(std::abs(fd - U0.trace_derivative(t)) < 1e-7);
      const double x1 = t / U0.c();
      const Complex fd2 = (U0(x1, -0.3 + h) - U0(x1, -0.3 - h)) / (2 * h);
      CHECK(std::abs(fd2 - U0.dx2(x1, -0.3)) < 1e-7);
    }
    CHECK(trace_refinement_defect(U0) < 1e-9);
  }
}

TEST_CASE("source support checks") {
  const Topography topo = Topography::gaussian_bump(0.5);
  CHECK_NOTHROW(check_source_support(SourceTerm::random(topo, 4, 3), topo));
  CHECK_THROWS_AS(check_source_support(SourceTerm::bump(0.0, -2.9, 0.5, 0.2), topo),
                  SupportError);
  CHECK_THROWS_AS(check_source_support(SourceTerm::mode(1, 1.5), Topography::flat()),
                  SupportError);
  CHECK_THROWS_AS(SourceTerm::custom([](double, double) { return Complex(1.0); },
                                     {0.0, 1.0, -1.0, 0.0}),
                  DomainError);
}

TEST_CASE("transport data") {
  SUBCASE("zero trace") {
    const Channel& ch = gaussian_resolvent().channel();
    auto td = transport_data(TraceFunction{[](double) { return Complex(0.0); },
                                           [](double) { return Complex(0.0); }, 0.0, 0.0},
                             ch, 32);
    CHECK(td.form.coeffs().norm() == 0.0);
  }
  SUBCASE("flat channel superposes the shifted derivative") {
    const Channel ch(Topography::flat(), kLambda);
    const double a = ch.intervals().theta0 + 2 * kPi + 3.0;  // one period inside b^1 .. b^N
    const auto g = [a](double t) { return Complex(envelope((t - a) / 2.5)); };
    const auto dg = [a](double t) {
      const double u = (t - a) / 2.5, s = 1.0 - u * u;
      return Complex(s > 0.0 ? 8.0 * std::pow(s, 7) * (-2.0 * u) / 2.5 : 0.0);
    };
    auto td = transport_data({g, dg, a - 2.5, a + 2.5}, ch, 64);
    for (double phi : {0.1, 1.0, 2.5, 4.0, 6.0}) {
      Complex expect = 0.0;
      for (int k = 1; k <= ch.intervals().N; ++k) expect -= dg(ch.intervals().theta0 + phi + 2 * kPi * k);
      CHECK(std::abs(td.form.evaluate(phi) - expect) < 1e-6);
    }
    CHECK(td.mean_defect < 1e-12);
  }
  SUBCASE("gaussian: mean zero for compactly supported g") {
    const OutgoingResolvent& R = gaussian_resolvent();
    IncidentField U0(SourceTerm::random(R.channel().topography(), 2, 5), R.channel().params());
    auto td = transport_data(U0.trace_function(), R.channel(), 128);
    CHECK(td.mean_defect < 1e-10);
    CHECK(td.form.coeffs().norm() > 1e-3);
  }
  SUBCASE("support outside the bounce range") {
    const Channel& ch = gaussian_resolvent().channel();
    const double t = ch.intervals().theta0;
    CHECK_THROWS_AS(transport_data({[](double) { return Complex(1.0); },
                                    [](double) { return Complex(0.0); }, t, t + 1.0},
                                   ch, 16),
                    SupportError);
  }
}

TEST_CASE("outgoing boundary data") {
  SUBCASE("zero data") {
    auto v = solve_outgoing_data(CircleForm(128), gaussian_resolvent().scattering());
    CHECK(v.v_L.coeffs().norm() == 0.0);
    CHECK(v.v_R.coeffs().norm() == 0.0);
  }
  SUBCASE("flat channel, negative mode") {
    CircleForm g(64);
    g.set_coeff(-1, 1.0);
    auto v = solve_outgoing_data(g, flat_resolvent().scattering());
    CHECK((v.v_L - g).coeffs().norm() < 1e-12);
    CHECK(v.v_R.coeffs().norm() < 1e-12);
  }
  SUBCASE("gaussian, random data") {
    const auto& a = gaussian_resolvent().scattering();
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const CircleForm g = random_band_form(128, 32, seed);
      auto v = solve_outgoing_data(g, a);
      const CircleForm res = v.v_L - a.B.apply(v.v_R) - g;
      CHECK(sobolev_norm(res.band_limited(32), 0.0) < 1e-8 * sobolev_norm(g, 0.0));
      CHECK(sobolev_norm(project(v.v_L, Sign::plus), 0.0) < 1e-10);
      CHECK(sobolev_norm(project(v.v_R, Sign::minus), 0.0) < 1e-10);
    }
  }
}

TEST_CASE("omega tiling") {
  SUBCASE("zero data") {
    const Channel& ch = gaussian_resolvent().channel();
    TraceFunction zero{[](double) { return Complex(0.0); }, [](double) { return Complex(0.0); },
                       0.0, 0.0};
    auto w = build_omega(CircleForm(32), zero, ch, -30.0, 30.0);
    CHECK(std::abs(w.value(1.0)) == 0.0);
  }
  SUBCASE("flat channel integrates v_L") {
    const Channel ch(Topography::flat(), kLambda);
    CircleForm v(32);  // sin(theta) in the J_L chart
    v.set_coeff(1, Complex(0.0, -0.5));
    v.set_coeff(-1, Complex(0.0, 0.5));
    TraceFunction zero{[](double) { return Complex(0.0); }, [](double) { return Complex(0.0); },
                       0.0, 0.0};
    const double t0 = ch.intervals().theta0;
    auto w = build_omega(v, zero, ch, t0 - 10.0, t0 + 30.0);
    for (double t : {t0 - 7.0, t0 + 0.3, t0 + 5.0, t0 + 22.2})
      CHECK(std::abs(w.value(t) - (1.0 - std::cos(t - t0))) < 1e-8);
    CHECK(w.max_jump() < 1e-12);
    CHECK_THROWS_AS(w.value(w.theta_max() + 0.1), WindowError);
    CHECK(w.theta_max() >= t0 + 30.0);
  }
  SUBCASE("gaussian cocycle") {
    const OutgoingResolvent& R = gaussian_resolvent();
    auto sol = R.solve(SourceTerm::random(R.channel().topography(), 2, 9), -10.0, 10.0);
    const Channel& ch = R.channel();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(sol.omega.theta_min(), sol.omega.theta_max());
    int checked = 0;
    double worst = 0.0;
    while (checked < 100) {
      const double t = u(rng), bt = ch.bounce(t);
      if (bt > sol.omega.theta_max()) continue;
      const Complex g = (bt > sol.U0.trace_min() && bt < sol.U0.trace_max()) ? sol.U0.trace(bt)
                                                                             : Complex(0.0);
      worst = std::max(worst, std::abs(sol.omega.value(t) - sol.omega.value(bt) + g));
      ++checked;
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("outgoing field reconstruction") {
  SUBCASE("zero source") {
    const OutgoingResolvent& R = flat_resolvent();
    auto sol = R.solve(SourceTerm::zero(), -3.0, 3.0);
    BoundaryGrid g(Topography::flat(), -3.0, 3.0, 30, 8);
    CHECK(sol.sample(g).values.norm() == 0.0);
  }
  SUBCASE("flat single mode against the Green-function oracle") {
    const OutgoingResolvent& R = flat_resolvent();
    auto sol = R.solve(SourceTerm::mode(), -8.0, 8.0);
    BoundaryGrid g(Topography::flat(), -8.0, 8.0, 256, 32);
    const WaveField u = sol.sample(g, 2);
    const double c = R.channel().c();
    Eigen::VectorXcd exact(g.size());
    Eigen::VectorXcd half_neumann(g.n1() + 1);
    for (int i = 0; i <= g.n1(); ++i) {
      const auto m = oracle::mode_green(g.x1(i), c, kLambda);
      half_neumann[i] = 0.5 * m.w;
      for (int j = 0; j <= g.n2(); ++j) exact[g.index(i, j)] = m.w * std::sin(g.x2(i, j));
    }
    CHECK(h1_norm(g, u.values - exact) / h1_norm(g, exact) < 1e-8);
    CHECK((neumann_data(u) - half_neumann).cwiseAbs().maxCoeff() < 1e-5);
    // Neumann data from the analytic representation.
    for (int i = 0; i <= g.n1(); i += 16)
      CHECK(std::abs(neumann_value(sol.U0, sol.omega, c * g.x1(i)) - half_neumann[i]) < 1e-7);
  }
  SUBCASE("gaussian: Dirichlet rows, interior residual, linearity") {
    const OutgoingResolvent& R = gaussian_resolvent();
    const Topography& topo = R.channel().topography();
    const SourceTerm f1 = SourceTerm::random(topo, 2, 21), f2 = SourceTerm::random(topo, 1, 22);
    const Complex alpha(0.3, -1.2);
    auto s1 = R.solve(f1, -4.0, 4.0), s2 = R.solve(f2, -4.0, 4.0);
    auto s12 = R.solve(alpha * f1 + f2, -4.0, 4.0);
    double err[2];
    for (int r = 0; r < 2; ++r) {
      BoundaryGrid g(topo, -3.0, 3.0, 96 << r, 32 << r);
      const WaveField u = s1.sample(g);
      double wall = 0.0;
      for (int i = 0; i <= g.n1(); ++i)
        wall = std::max({wall, std::abs(u.at(i, 0)), std::abs(u.at(i, g.n2()))});
      CHECK(wall < 1e-8);
      const double l2 = kLambda * kLambda;
      const Eigen::VectorXcd Pu = apply_operator(g, -l2, 1.0 - l2, u.values);
      const Eigen::VectorXcd fs = sample_on_grid(g, f1);
      double worst = 0.0;
      for (int i = 1; i < g.n1(); ++i)
        for (int j = 1; j < g.n2(); ++j)
          worst = std::max(worst, std::abs(Pu[g.index(i, j)] - fs[g.index(i, j)]));
      err[r] = worst;
    }
    CHECK(err[0] / err[1] > 3.0);
    BoundaryGrid g(topo, -4.0, 4.0, 40, 10);
    const Eigen::VectorXcd lin =
        s12.sample(g).values - alpha * s1.sample(g).values - s2.sample(g).values;
    CHECK(lin.cwiseAbs().maxCoeff() < 1e-12 * (1.0 + s12.sample(g).values.cwiseAbs().maxCoeff()));
  }
  SUBCASE("window errors") {
    const OutgoingResolvent& R = flat_resolvent();
    auto sol = R.solve(SourceTerm::mode(), -2.0, 2.0);
    BoundaryGrid g(Topography::flat(), -60.0, 2.0, 20, 4);
    CHECK_THROWS_AS(sol.sample(g), WindowError);
  }
}

TEST_CASE("Neumann data of the reconstructed field on the fundamental intervals") {
  const OutgoingResolvent& R = gaussian_resolvent();
  const Channel& ch = R.channel();
  auto sol = R.solve(SourceTerm::random(ch.topography(), 3, 31), -2.0, 2.0);
  CHECK(sol.diagnostics.transport_residual < 1e-8);
  CHECK(sol.diagnostics.outgoing_defect_L < 1e-10);
  CHECK(sol.diagnostics.outgoing_defect_R < 1e-10);
  CHECK(sol.warnings.empty());
  const auto on = [&](double t0) {
    return neumann_form(sol.sample(fundamental_grid(ch, t0, 1024, 256)), 128);
  };
  const CircleForm nL = on(ch.intervals().theta0), nR = on(ch.intervals().theta_R0);
  CHECK(sobolev_norm(nL + sol.v.v_L, 0.0) < 1e-6);
  CHECK(sobolev_norm(nR + sol.v.v_R, 0.0) < 1e-6);
  // Outgoing condition seen from the field.
  CHECK(sobolev_norm(project(nL, Sign::plus), 0.0) < 1e-6);
  CHECK(sobolev_norm(project(nR, Sign::minus), 0.0) < 1e-6);
}
