#include "subwave/scattering.hpp"

#include <Eigen/LU>

#include <limits>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace subwave {

namespace {

// Largest singular value of A by power iteration on A^H A.
double spectral_norm(const Eigen::MatrixXcd& A) {
  const Eigen::Index n = A.cols();
  Eigen::VectorXcd x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x[i] = Complex(1.0 + 0.37 * std::sin(1.3 * double(i)), 0.21 * std::cos(0.7 * double(i)));
  x.normalize();
  double est = 0.0;
  for (int it = 0; it < 300; ++it) {
    const Eigen::VectorXcd y = A.adjoint() * (A * x);
    const double nrm = y.norm();
    if (nrm == 0.0) return 0.0;
    const double next = std::sqrt(nrm);
    x = y / nrm;
    const bool done = it > 5 && std::abs(next - est) <= 1e-9 * next;
    est = next;
    if (done) break;
  }
  return est;
}

}  // namespace

Eigen::MatrixXcd assemble_T(const PullbackMatrix& B, const PullbackMatrix& Binv) {
  if (B.K != Binv.K) throw DomainError("pullback matrices of different order");
  const int K = B.K;
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Identity(2 * K, 2 * K);
  T.block(0, K, K, K) = -B.entries.block(0, K, K, K);
  T.block(K, 0, K, K) = -Binv.entries.block(K, 0, K, K);
  return T;
}

ScatteringAssembly assemble_scattering(const CircleMap& map,
                                       const CircleMap& inverse,
                                       const ScatteringOptions& options) {
  ScatteringAssembly a;
  a.K = options.K;
  a.B = assemble_pullback(map, options.K, options.n_quad);
  a.Binv = assemble_pullback(inverse, options.K, options.n_quad);
  for (const auto* p : {&a.B, &a.Binv})
    a.warnings.insert(a.warnings.end(), p->warnings.begin(), p->warnings.end());
  a.T = assemble_T(a.B, a.Binv);
  const Eigen::MatrixXcd off = a.T - Eigen::MatrixXcd::Identity(2 * a.K, 2 * a.K);
  a.offdiag_norm = spectral_norm(off);
  a.T_inverse = Eigen::PartialPivLU<Eigen::MatrixXcd>(a.T).inverse();
  const double inv_norm = spectral_norm(a.T_inverse);
  a.min_singular_T = inv_norm > 0.0 ? 1.0 / inv_norm : 0.0;
  a.cond_T = spectral_norm(a.T) * inv_norm;
  if (!std::isfinite(a.cond_T)) a.cond_T = std::numeric_limits<double>::infinity();
  return a;
}

ScatteringAssembly assemble_scattering(const Channel& channel,
                                       const ScatteringOptions& options) {
  ScatteringAssembly a =
      assemble_scattering(channel.circle_map(), channel.inverse_circle_map(), options);
  if (channel.params().subcritical_margin < options.margin_warning) {
    std::ostringstream os;
    os << "subcritical margin " << channel.params().subcritical_margin
       << " is below " << options.margin_warning << "; finite sections degrade";
    a.warnings.push_back({"ConditioningWarning", os.str()});
  }
  return a;
}

const Eigen::MatrixXcd& scattering_matrix(ScatteringAssembly& a, double cond_cap) {
  if (!(a.cond_T <= cond_cap)) throw IllConditionedError(a.cond_T, cond_cap);
  const int K = a.K;
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(2 * K, 2 * K);
  D.block(0, 0, K, K) = a.B.entries.block(0, 0, K, K);
  D.block(K, K, K, K) = a.Binv.entries.block(K, K, K, K);
  a.S = a.T_inverse * D;
  return a.S;
}

ScatteringAssembly build_scattering(const Channel& channel,
                                    const ScatteringOptions& options) {
  ScatteringAssembly a = assemble_scattering(channel, options);
  scattering_matrix(a, options.cond_cap);
  return a;
}

SmoothingRemainder smoothing_remainder(const ScatteringAssembly& a) {
  if (!a.has_scattering_matrix()) throw DomainError("scattering matrix not computed");
  const int K = a.K;
  SmoothingRemainder r;
  r.R = a.S;
  r.R.block(0, 0, K, K) -= a.B.entries.block(0, 0, K, K);
  r.R.block(K, K, K, K) -= a.Binv.entries.block(K, K, K, K);
  r.band = std::max(1, K / 4);
  for (int i = 0; i < 2 * K; ++i) {
    const int j = CircleForm::mode(i, K);
    if (std::abs(j) > r.band) continue;
    for (int l = 0; l < 2 * K; ++l) {
      const int k = CircleForm::mode(l, K);
      if (std::abs(k) > r.band) continue;
      const double v = std::abs(r.R(i, l));
      const double w = 1.0 + std::abs(j) + std::abs(k);
      r.max_abs = std::max(r.max_abs, v);
      r.C2 = std::max(r.C2, v * std::pow(w, 2));
      r.C4 = std::max(r.C4, v * std::pow(w, 4));
      r.C6 = std::max(r.C6, v * std::pow(w, 6));
    }
  }
  return r;
}

BoundaryPair solve_homogeneous_data(const ScatteringAssembly& a,
                                    const CircleForm& g_in) {
  if (!a.has_scattering_matrix()) throw DomainError("scattering matrix not computed");
  if (g_in.order() != a.K) throw DomainError("incoming data at wrong truncation order");
  const CircleForm g_out(a.K, a.S * g_in.coeffs());
  return {project(g_in, Sign::plus) + project(g_out, Sign::minus),
          project(g_in, Sign::minus) + project(g_out, Sign::plus)};
}

CircleForm random_band_form(int K, int band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CircleForm v(K);
  for (int k = 1; k <= std::min(band, K); ++k) {
    const double re1 = g(rng), im1 = g(rng), re2 = g(rng), im2 = g(rng);
    v.set_coeff(k, Complex(re1, im1));
    v.set_coeff(-k, Complex(re2, im2));
  }
  return v;
}

ScatteringDiagnostics diagnose_scattering(const ScatteringAssembly& a, int trials,
                                          std::uint64_t seed) {
  ScatteringDiagnostics d;
  d.trials = trials;
  const int band = std::max(1, a.K / 4);
  std::mt19937_64 seeds(seed);
  for (int t = 0; t < trials; ++t) {
    const CircleForm g = random_band_form(a.K, band, seeds());
    const CircleForm Sg(a.K, a.S * g.coeffs());
    for (double s : {0.5, -0.5}) {
      const double n0 = sobolev_norm(g, s);
      const double rel = std::abs(sobolev_norm(Sg, s) - n0) / n0;
      double& slot = s > 0 ? d.unitarity_defect_h_half : d.unitarity_defect_h_minus_half;
      slot = std::max(slot, rel);
    }
    const BoundaryPair v = solve_homogeneous_data(a, g);
    for (double s : {0.5, -0.5}) {
      const auto sq = [s](const CircleForm& f) { return std::pow(sobolev_norm(f, s), 2); };
      const double in = sq(project(v.v_L, Sign::plus)) + sq(project(v.v_R, Sign::minus));
      const double out = sq(project(v.v_R, Sign::plus)) + sq(project(v.v_L, Sign::minus));
      const double rel = std::abs(in - out) / std::max(in, out);
      double& slot = s > 0 ? d.flux_balance_defect : d.primitive_flux_balance_defect;
      slot = std::max(slot, rel);
    }
    const CircleForm res = (v.v_L - a.B.apply(v.v_R)).band_limited(band);
    d.transport_residual =
        std::max(d.transport_residual, sobolev_norm(res, 0.0) / sobolev_norm(g, 0.0));
  }
  return d;
}

}  // namespace subwave
