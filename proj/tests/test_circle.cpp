#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "subwave/circle.hpp"
#include "subwave/geometry.hpp"

using namespace subwave;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<Complex> sample(int n, auto f) {
  std::vector<Complex> v(n);
  for (int m = 0; m < n; ++m) v[m] = f(2 * kPi * m / n);
  return v;
}

CircleForm random_form(int K, int band, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CircleForm v(K);
  for (int k = 1; k <= band; ++k) {
    v.set_coeff(k, Complex(g(rng), g(rng)));
    v.set_coeff(-k, Complex(g(rng), g(rng)));
  }
  return v;
}

// A smooth degree-one circle diffeomorphism phi(t) = t + a sin(t + p).
CircleMap wobble(double a, double p) {
  return [a, p](double t) { return CirclePoint{t + a * std::sin(t + p), 1.0 + a * std::cos(t + p)}; };
}
}  // namespace

TEST_CASE("sampling and mode layout") {
  CHECK(CircleForm::index(-3, 3) == 0);
  CHECK(CircleForm::index(-1, 3) == 2);
  CHECK(CircleForm::index(1, 3) == 3);
  CHECK(CircleForm::mode(5, 3) == 3);
  CHECK_THROWS_AS(CircleForm::index(0, 3), DomainError);

  SUBCASE("sin") {
    auto s = from_samples(sample(64, [](double t) { return Complex(std::sin(t)); }), 8);
    CHECK(std::abs(s.form.coeff(1) - 1.0 / Complex(0, 2)) < 1e-15);
    CHECK(std::abs(s.form.coeff(-1) + 1.0 / Complex(0, 2)) < 1e-15);
    CHECK(s.form.coeffs().cwiseAbs().sum() == doctest::Approx(1.0));
    CHECK(s.warnings.empty());
  }
  SUBCASE("constant is removed with recorded defect") {
    auto s = from_samples(sample(40, [](double) { return Complex(1.0); }), 8);
    CHECK(s.mean_defect == doctest::Approx(1.0));
    CHECK(s.form.coeffs().norm() < 1e-15);
  }
  SUBCASE("modulated exponential") {
    auto s = from_samples(sample(64, [](double t) {
                            return std::polar(1.0, 3 * t) * (1.0 + 0.1 * std::cos(t));
                          }),
                          8);
    for (int k = -8; k <= 8; ++k) {
      if (k == 0) continue;
      const double expect = k == 3 ? 1.0 : (k == 2 || k == 4) ? 0.05 : 0.0;
      CHECK(std::abs(s.form.coeff(k) - expect) < 1e-12);
    }
  }
  SUBCASE("alias warning and undersampling") {
    auto s = from_samples(sample(64, [](double t) { return std::polar(1.0, 12 * t); }), 8);
    REQUIRE(s.warnings.size() == 1);
    CHECK(s.warnings[0].kind == "AliasWarning");
    CHECK_THROWS_AS(from_samples(sample(30, [](double) { return Complex(0); }), 8),
                    DomainError);
  }
  SUBCASE("evaluate and samples agree") {
    std::mt19937_64 rng(4);
    auto v = random_form(6, 6, rng);
    auto vals = v.samples(32);
    for (int m = 0; m < 32; ++m)
      CHECK(std::abs(vals[m] - v.evaluate(2 * kPi * m / 32)) < 1e-12);
    // Antiderivative by quadrature.
    const double t = 2.1;
    Complex q = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) q += v.evaluate((i + 0.5) * t / n) * (t / n);
    CHECK(std::abs(q - v.antiderivative(t)) < 1e-5);
  }
}

TEST_CASE("projectors, norms, flux") {
  auto cos_form = from_samples(sample(32, [](double t) { return Complex(std::cos(t)); }), 4).form;
  auto plus = project(cos_form, Sign::plus);
  CHECK(std::abs(plus.coeff(1) - 0.5) < 1e-15);
  CHECK(plus.coeff(-1) == Complex(0));
  std::mt19937_64 rng(1);
  auto v = random_form(10, 10, rng);
  CHECK((project(v, Sign::plus) + project(v, Sign::minus)).coeffs() == v.coeffs());
  CHECK(project(project(v, Sign::minus), Sign::plus).coeffs().norm() == 0.0);
  CircleForm e(4);
  e.set_coeff(-2, 1.0);
  CHECK(project(e, Sign::plus).coeffs().norm() == 0.0);

  CircleForm a(4);
  a.set_coeff(1, 1.0);
  CHECK(sobolev_norm(a, 0.5) == doctest::Approx(1.0));
  CHECK(quantum_flux(a) == doctest::Approx(2 * kPi));
  CircleForm b(4);
  b.set_coeff(2, 1.0);
  CHECK(sobolev_norm(b, 1.0) == doctest::Approx(2.0));
  CircleForm c(4);
  c.set_coeff(1, 1.0);
  c.set_coeff(-3, 1.0);
  CHECK(sobolev_norm(c, 0.5) == doctest::Approx(2.0));
  CircleForm d(4);
  d.set_coeff(2, 1.0);
  d.set_coeff(-1, 1.0);
  CHECK(quantum_flux(d) == doctest::Approx(2 * kPi));
  auto sinf = from_samples(sample(32, [](double t) { return Complex(std::sin(t)); }), 4).form;
  CHECK(std::abs(quantum_flux(sinf)) < 1e-14);
  // Flux splits into the two projected H^{1/2} norms.
  const double fp = sobolev_norm(project(v, Sign::plus), 0.5);
  const double fm = sobolev_norm(project(v, Sign::minus), 0.5);
  CHECK(quantum_flux(v) == doctest::Approx(2 * kPi * (fp * fp - fm * fm)));
  // Parseval against sampled L2 norm.
  auto vals = v.samples(64);
  CHECK(sobolev_norm(v, 0.0) == doctest::Approx(std::sqrt(vals.squaredNorm() / 64.0)).epsilon(1e-10));
}

TEST_CASE("pullback matrices") {
  SUBCASE("identity and rigid shift") {
    auto id = assemble_pullback([](double t) { return CirclePoint{t, 1.0}; }, 8);
    CHECK((id.entries - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-14);
    const double a = kPi / 3;
    auto sh = assemble_pullback([a](double t) { return CirclePoint{t + a, 1.0}; }, 8);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) {
        const Complex expect = i == j ? std::polar(1.0, CircleForm::mode(i, 8) * a) : 0.0;
        CHECK(std::abs(sh.entries(i, j) - expect) < 1e-13);
      }
  }
  SUBCASE("pointwise oracle for the channel map") {
    Channel ch(Topography::gaussian_bump(0.5), 1.0 / std::sqrt(2.0));
    const int K = 32;
    auto B = assemble_pullback(ch.circle_map(), K);
    CHECK(B.warnings.empty());
    std::mt19937_64 rng(7);
    auto v = random_form(K, K / 4, rng);
    auto Bv = B.apply(v);
    const int n = 2048;
    std::vector<Complex> vals(n);
    for (int m = 0; m < n; ++m) {
      auto q = ch.circle_lift(2 * kPi * m / n);
      vals[m] = v.evaluate(q.angle) * q.derivative;
    }
    auto direct = from_samples(vals, K).form;
    CHECK((direct.coeffs() - Bv.coeffs()).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("flux invariance, composition, inverse") {
    const int K = 64;
    auto phi = wobble(0.4, 0.3);
    auto psi = wobble(-0.3, 1.1);
    auto Bphi = assemble_pullback(phi, K);
    auto Bpsi = assemble_pullback(psi, K);
    auto comp = assemble_pullback(
        [&](double t) {
          auto p = psi(t);
          auto q = phi(p.angle);
          return CirclePoint{q.angle, q.derivative * p.derivative};
        },
        K);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
      auto v = random_form(K, K / 4, rng);
      const double F = primitive_flux(v);
      CHECK(std::abs(primitive_flux(Bphi.apply(v)) - F) <= 1e-8 * (1 + std::abs(F)));
    }
    const int inner = K / 4;
    Eigen::MatrixXcd prod = Bpsi.entries * Bphi.entries;
    Eigen::MatrixXcd inv_prod = Bphi.entries * assemble_pullback(invert_circle_map(phi), K).entries;
    double comp_err = 0.0, inv_err = 0.0;
    for (int i = 0; i < 2 * K; ++i)
      for (int j = 0; j < 2 * K; ++j) {
        if (std::abs(CircleForm::mode(i, K)) > inner || std::abs(CircleForm::mode(j, K)) > inner)
          continue;
        comp_err = std::max(comp_err, std::abs(comp.entries(i, j) - prod(i, j)));
        inv_err = std::max(inv_err, std::abs(inv_prod(i, j) - (i == j ? 1.0 : 0.0)));
      }
    CHECK(comp_err < 1e-8);
    CHECK(inv_err < 1e-8);
  }
  SUBCASE("bisection inverse matches closed-form inverse of a shift") {
    auto inv = invert_circle_map([](double t) { return CirclePoint{t + 0.7, 1.0}; });
    CHECK(inv(1.0).angle == doctest::Approx(0.3).epsilon(1e-12));
  }
}

TEST_CASE("circle form CSV round trip") {
  std::mt19937_64 rng(3);
  auto v = random_form(5, 5, rng);
  std::stringstream ss;
  write_form_csv(ss, v);
  auto w = read_form_csv(ss);
  CHECK(w.order() == 5);
  CHECK(w.coeffs() == v.coeffs());
  std::stringstream bad("x,y\n");
  CHECK_THROWS_AS(read_form_csv(bad), ConfigError);
}
