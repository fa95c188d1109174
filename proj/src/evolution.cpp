#include "subwave/evolution.hpp"

#include <Eigen/CholmodSupport>

#include <cmath>
#include <numbers>
#include <sstream>

namespace subwave {

struct DirichletLaplacian::Factor {
  Eigen::CholmodDecomposition<Eigen::SparseMatrix<double>> chol;
};

DirichletLaplacian::DirichletLaplacian(const BoundaryGrid& grid)
    : grid_(grid), layout_{1, grid.n1() - 1, grid.n2()}, factor_(std::make_unique<Factor>()) {
  lap_ = assemble_weighted_operator<double>(grid_, 1.0, 1.0, 1, grid_.n1() - 1);
  d22_ = assemble_weighted_operator<double>(grid_, 0.0, 1.0, 1, grid_.n1() - 1);
  weights_.resize(layout_.unknowns());
  for (int i = 1; i < grid_.n1(); ++i)
    for (int j = 1; j < grid_.n2(); ++j) weights_[layout_.index(i, j)] = std::abs(grid_.depth(i));
  const Eigen::SparseMatrix<double> neg = -lap_;
  factor_->chol.compute(neg);
  if (factor_->chol.info() != Eigen::Success)
    throw SingularSystemError("Cholesky factorization of the Dirichlet Laplacian failed");
}

DirichletLaplacian::~DirichletLaplacian() = default;
DirichletLaplacian::DirichletLaplacian(DirichletLaplacian&&) noexcept = default;
DirichletLaplacian& DirichletLaplacian::operator=(DirichletLaplacian&&) noexcept = default;

Eigen::VectorXcd DirichletLaplacian::solve(const Eigen::VectorXcd& w) const {
  Eigen::MatrixXd rhs(w.size(), 2);
  rhs.col(0) = -(weights_.array() * w.real().array()).matrix();
  rhs.col(1) = -(weights_.array() * w.imag().array()).matrix();
  const Eigen::MatrixXd x = factor_->chol.solve(rhs);
  if (factor_->chol.info() != Eigen::Success) throw SingularSystemError("Cholesky solve failed");
  Eigen::VectorXcd u(w.size());
  u.real() = x.col(0);
  u.imag() = x.col(1);
  return u;
}

Eigen::VectorXcd DirichletLaplacian::apply(const Eigen::VectorXcd& u) const {
  return (lap_.cast<Complex>() * u).cwiseQuotient(weights_.cast<Complex>());
}

Eigen::VectorXcd DirichletLaplacian::apply_d22(const Eigen::VectorXcd& u) const {
  return (d22_.cast<Complex>() * u).cwiseQuotient(weights_.cast<Complex>());
}

Eigen::VectorXcd DirichletLaplacian::restrict(const Eigen::VectorXcd& full) const {
  Eigen::VectorXcd v(layout_.unknowns());
  for (int i = 1; i < grid_.n1(); ++i)
    for (int j = 1; j < grid_.n2(); ++j) v[layout_.index(i, j)] = full[grid_.index(i, j)];
  return v;
}

Eigen::VectorXcd DirichletLaplacian::extend(const Eigen::VectorXcd& interior) const {
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(grid_.size());
  for (int i = 1; i < grid_.n1(); ++i)
    for (int j = 1; j < grid_.n2(); ++j) full[grid_.index(i, j)] = interior[layout_.index(i, j)];
  return full;
}

namespace {

Complex dot(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXcd& a,
            const Eigen::VectorXcd& b) {
  return a.dot(A.cast<Complex>() * b);
}

}  // namespace

EvolutionTrace evolve(const Topography& topo, const EvolutionConfig& cfg) {
  if (!(cfg.dt > 0.0) || cfg.dt > 0.5) throw DomainError("dt must lie in (0, 0.5]");
  if (!(cfg.T_final > 0.0)) throw DomainError("T_final must be positive");
  if (cfg.snapshot_stride < 1) throw DomainError("snapshot stride must be at least 1");
  if (!(cfg.h1 > 0.0) || cfg.n2 < 2) throw DomainError("invalid evolution grid");
  if (std::abs(cfg.chi.center) + cfg.chi.outer > cfg.L_report + 1e-12)
    throw DomainError("cutoff must vanish on |x1| >= L_report");
  check_subcritical(topo, cfg.lambda);
  const double needed = cfg.L_report + kMaxGroupSpeed * cfg.T_final + 2.0;
  const double L_req = cfg.L_evo > 0.0 ? cfg.L_evo : needed;
  if (L_req < needed - 1e-12) {
    std::ostringstream os;
    os << "L_evo = " << L_req << " is below L_report + v_g T + 2 = " << needed;
    throw DomainError(os.str());
  }
  const SourceBox box = cfg.source.support();
  if (!cfg.source.empty() && std::max(std::abs(box.x1_min), std::abs(box.x1_max)) > L_req + 1e-12)
    throw DomainError("source reaches the evolution walls");

  const int m = std::max(1, int(std::lround(cfg.L_report / cfg.h1)));
  const double h = cfg.L_report / m;
  const int half = int(std::ceil(L_req / h - 1e-9));
  const double L = h * half;
  const BoundaryGrid grid(topo, -L, L, 2 * half, cfg.n2);
  const DirichletLaplacian lap(grid);

  EvolutionTrace trace{BoundaryGrid(topo, -cfg.L_report, cfg.L_report, 2 * m, cfg.n2), L, cfg.dt,
                       {}, {}, {}, {}, {}};
  const int offset = half - m;
  std::vector<double> chi(2 * m + 1);
  for (int i = 0; i <= 2 * m; ++i) chi[i] = cfg.chi(trace.report_grid.x1(i));

  const Eigen::VectorXcd f = lap.restrict(sample_on_grid(grid, cfg.source));
  const double fnorm = f.norm();
  const int steps = int(std::ceil(cfg.T_final / cfg.dt - 1e-9));

  Eigen::VectorXcd w_prev = Eigen::VectorXcd::Zero(f.size());
  Eigen::VectorXcd w = (0.5 * cfg.dt * cfg.dt) * f;
  Eigen::VectorXcd u_prev = Eigen::VectorXcd::Zero(f.size());
  Eigen::VectorXcd u = lap.solve(w);

  const auto record = [&](int n, const Eigen::VectorXcd& un, const Eigen::VectorXcd& un_prev) {
    const BoundaryGrid& rg = trace.report_grid;
    Eigen::VectorXcd snap = Eigen::VectorXcd::Zero(rg.size());
    for (int i = 0; i <= 2 * m; ++i) {
      const int gi = i + offset;
      if (gi < 1 || gi >= grid.n1() || chi[i] == 0.0) continue;
      for (int j = 1; j < cfg.n2; ++j) snap[rg.index(i, j)] = chi[i] * un[lap.layout().index(gi, j)];
    }
    trace.steps.push_back(n);
    trace.times.push_back(n * cfg.dt);
    trace.h1_norms.push_back(h1_norm(rg, snap));
    trace.snapshots.push_back(std::move(snap));
    const Eigen::VectorXcd du = un - un_prev;
    const double e = -(dot(lap.weighted_laplacian(), du, du)).real() / (cfg.dt * cfg.dt) -
                     dot(lap.weighted_d22(), un_prev, un).real();
    trace.energy.push_back(e);
  };
  record(0, u_prev, u_prev);

  for (int n = 1; n <= steps; ++n) {
    if (n % cfg.snapshot_stride == 0) record(n, u, u_prev);
    if (n == steps) break;
    const double t = n * cfg.dt;
    const double forcing = t < cfg.forcing_off ? std::cos(cfg.lambda * t) : 0.0;
    Eigen::VectorXcd w_next = 2.0 * w - w_prev + (cfg.dt * cfg.dt) * (forcing * f - lap.apply_d22(u));
    w_prev = std::move(w);
    w = std::move(w_next);
    u_prev = std::move(u);
    u = lap.solve(w);
    const double t1 = (n + 1) * cfg.dt;
    if (!(w.norm() <= cfg.stability_factor * fnorm * (1.0 + 0.5 * t1 * t1)) && fnorm > 0.0) {
      std::ostringstream os;
      os << "||w|| = " << w.norm() << " at t = " << t1 << " exceeds the forced growth bound";
      throw StabilityError(os.str());
    }
  }
  return trace;
}

WaveField standing_wave_extract(const EvolutionTrace& trace, double lambda, double t_begin,
                                double t_end) {
  if (trace.times.size() < 2) throw WindowError("trace has fewer than two snapshots");
  const double dt_snap = trace.times[1] - trace.times[0];
  const double period = 2.0 * std::numbers::pi / lambda;
  if (period / dt_snap < 16.0 - 1e-9) {
    std::ostringstream os;
    os << "snapshot spacing " << dt_snap << " gives " << period / dt_snap
       << " snapshots per period (16 required)";
    throw WindowError(os.str());
  }
  if (!(t_end > t_begin) || t_begin < trace.times.front() - 1e-9 ||
      t_end > trace.times.back() + 1e-9)
    throw WindowError("demodulation window not covered by the trace");
  WaveField out(trace.report_grid, lambda);
  int count = 0;
  for (std::size_t s = 0; s < trace.times.size(); ++s) {
    const double t = trace.times[s];
    if (t < t_begin - 1e-9 || t > t_end + 1e-9) continue;
    out.values += std::polar(1.0, -lambda * t) * trace.snapshots[s];
    ++count;
  }
  if (count < 2) throw WindowError("demodulation window holds fewer than two snapshots");
  out.values *= 2.0 / (count * dt_snap) * dt_snap;
  return out;
}

double norm_trend(const EvolutionTrace& trace, double t_begin, double t_end) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  int n = 0;
  for (std::size_t s = 0; s < trace.times.size(); ++s) {
    const double t = trace.times[s];
    if (t < t_begin || t > t_end) continue;
    st += t;
    sy += trace.h1_norms[s];
    stt += t * t;
    sty += t * trace.h1_norms[s];
    ++n;
  }
  if (n < 2) throw WindowError("trend window holds fewer than two snapshots");
  return (n * sty - st * sy) / (n * stt - st * st);
}

}  // namespace subwave
