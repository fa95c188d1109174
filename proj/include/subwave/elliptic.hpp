#pragma once

#include <vector>

#include "subwave/grid.hpp"
#include "subwave/source.hpp"
#include "subwave/stationary.hpp"

namespace subwave {

/// Complex-frequency Dirichlet problem P(lambda - i eps) u = f on the channel
/// truncated to |x1| <= L.
struct ResolventProblem {
  double lambda = 0.0;
  double epsilon = 0.1;
  double L = 0.0;  // 0 selects R0 + 8
  int n1 = 1024;
  int n2 = 128;
  SourceTerm source;
  double min_epsilon = 0.01;
  bool check_refinement = false;
  double refinement_tolerance = 1e-3;
};

/// Root of c^2 = (1 - w^2) / w^2, w = lambda - i eps, with Im c > 0.
Complex complex_slope(double lambda, double epsilon);

/// Decay factors z_k (|z_k| < 1) of the discrete flat-end recurrence for the
/// vertical sine modes k = 1..n2-1, and the face closure U_ghost = Z U_face.
Eigen::VectorXcd face_decay_factors(Complex a1, Complex a2, double h1, int n2);
Eigen::MatrixXcd face_closure(Complex a1, Complex a2, double h1, int n2);

struct ResolventSolution {
  WaveField field;
  Complex c_eps;
  double residual = 0.0;  // relative l2 residual of the linear solve
  Warnings warnings;
};

/// Second-order boundary-fitted discretization with the discrete-exact modal
/// radiation closure at x1 = +-L, solved by sparse LU (UMFPACK).
/// Throws DomainError for eps below min_epsilon or an unsuitable truncation,
/// SingularSystemError if the factorization fails.
ResolventSolution solve_resolvent(const Topography& topo, const ResolventProblem& problem);

struct LapRow {
  double epsilon = 0.0;
  double h1_diff = 0.0;  // ||chi (u_eps - R(lambda) f)||_{H1}
  double h1_norm = 0.0;  // ||chi u_eps||_{H1}
};

struct LapSweep {
  std::vector<LapRow> rows;
  double floor = 0.0;          // ||chi (u_eps,h - u_eps,2h)||_{H1} at the smallest eps
  double reference_norm = 0.0; // ||chi R(lambda) f||_{H1}
  Warnings warnings;
};

/// Compares u_eps with the outgoing resolvent on the problem grid for each
/// eps in the (decreasing) list, and estimates the discretization floor from
/// the grid with n1/2, n2/2.
LapSweep lap_sweep(const OutgoingResolvent& resolvent, const ResolventProblem& base,
                   const std::vector<double>& eps_list, const Cutoff& chi, int threads = 1);

}  // namespace subwave
