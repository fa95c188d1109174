#pragma once

#include <Eigen/Sparse>
#include <limits>
#include <memory>
#include <vector>

#include "subwave/grid.hpp"
#include "subwave/source.hpp"

namespace subwave {

/// Largest horizontal group speed of the channel modes omega = k / sqrt(k1^2 + k^2):
/// max over k1 of k k1 / (k1^2 + k^2)^{3/2}, attained at k1 = k / sqrt(2) with
/// k = 1.
inline constexpr double kMaxGroupSpeed = 0.38490017945975050;  // 2 / (3 sqrt 3)

/// Factorized Dirichlet Laplacian on the interior nodes of a boundary-fitted
/// grid (1 <= i <= n1 - 1, 1 <= j <= n2 - 1), in the layout of
/// InteriorLayout{1, n1 - 1, n2}. Sparse Cholesky (CHOLMOD) of -|G| Delta_h.
class DirichletLaplacian {
 public:
  explicit DirichletLaplacian(const BoundaryGrid& grid);
  ~DirichletLaplacian();
  DirichletLaplacian(DirichletLaplacian&&) noexcept;
  DirichletLaplacian& operator=(DirichletLaplacian&&) noexcept;

  const BoundaryGrid& grid() const noexcept { return grid_; }
  const InteriorLayout& layout() const noexcept { return layout_; }
  /// Delta_h^{-1} w.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& w) const;
  /// Delta_h u.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const;
  /// d_{x2}^2 u (discrete, same stencil family).
  Eigen::VectorXcd apply_d22(const Eigen::VectorXcd& u) const;
  /// Area weights |G_i| per unknown, so <a, b> = sum weight * conj(a) * b.
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  /// Weighted matrices |G| Delta_h and |G| d22.
  const Eigen::SparseMatrix<double>& weighted_laplacian() const noexcept { return lap_; }
  const Eigen::SparseMatrix<double>& weighted_d22() const noexcept { return d22_; }

  Eigen::VectorXcd restrict(const Eigen::VectorXcd& full) const;
  Eigen::VectorXcd extend(const Eigen::VectorXcd& interior) const;

 private:
  struct Factor;
  BoundaryGrid grid_;
  InteriorLayout layout_;
  Eigen::SparseMatrix<double> lap_, d22_;
  Eigen::VectorXd weights_;
  std::unique_ptr<Factor> factor_;
};

struct EvolutionConfig {
  double lambda = 0.0;
  double T_final = 400.0;
  double dt = 0.25;
  double L_report = 4.0;  // chi must vanish on |x1| >= L_report
  double L_evo = 0.0;     // 0 selects L_report + v_g T_final + 2
  double h1 = 0.1;
  int n2 = 32;
  SourceTerm source;
  Cutoff chi;
  int snapshot_stride = 2;
  double forcing_off = std::numeric_limits<double>::infinity();
  double stability_factor = 10.0;
};

struct EvolutionTrace {
  BoundaryGrid report_grid;                  // |x1| <= L_report
  double L_evo = 0.0;
  double dt = 0.0;
  std::vector<int> steps;
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> snapshots;   // chi u(t) on report_grid
  std::vector<double> h1_norms;              // ||chi u(t)||_{H1}
  std::vector<double> energy;                // leapfrog energy at each snapshot
};

/// Leapfrog for (d_t^2 + P) w = f cos(lambda t), P = d_{x2}^2 Delta^{-1}, with
/// w^0 = 0, w^1 = dt^2 f / 2, and u = Delta^{-1} w recorded every
/// snapshot_stride steps. Throws DomainError on invalid configs (dt > 0.5,
/// L_evo below the group-speed bound, chi reaching past L_report) and
/// StabilityError if ||w|| exceeds stability_factor times the forced bound
/// ||f|| (1 + t^2 / 2).
EvolutionTrace evolve(const Topography& topo, const EvolutionConfig& config);

/// u_T = (2 / |W|) sum over snapshots in W = [t_begin, t_end] of
/// e^{-i lambda t} chi u(t) dt_snap. Throws WindowError if W is not covered
/// by the trace or has fewer than 16 snapshots per forcing period.
WaveField standing_wave_extract(const EvolutionTrace& trace, double lambda, double t_begin,
                                double t_end);

/// Least-squares slope of h1_norms over snapshots with time in [t_begin, t_end].
double norm_trend(const EvolutionTrace& trace, double t_begin, double t_end);

}  // namespace subwave
