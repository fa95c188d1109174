#include "subwave/elliptic.hpp"

#include <Eigen/UmfPackSupport>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace subwave {

Complex complex_slope(double lambda, double epsilon) {
  const Complex w(lambda, -epsilon);
  Complex c = std::sqrt((1.0 - w * w) / (w * w));
  if (c.imag() < 0.0) c = -c;
  return c;
}

Eigen::VectorXcd face_decay_factors(Complex a1, Complex a2, double h1, int n2) {
  const double hs = 1.0 / n2, depth2 = kFlatDepth * kFlatDepth;
  Eigen::VectorXcd z(n2 - 1);
  for (int k = 1; k < n2; ++k) {
    const double s = std::sin(k * std::numbers::pi * hs / 2.0);
    const double mu = -4.0 / (hs * hs) * s * s;
    const Complex sum = 2.0 - h1 * h1 * a2 * mu / (a1 * depth2);
    const Complex root = std::sqrt(sum * sum - 4.0);
    Complex zk = 0.5 * (sum - root);
    if (std::abs(zk) > 1.0) zk = 0.5 * (sum + root);
    if (!(std::abs(zk) < 1.0)) {
      std::ostringstream os;
      os << "flat-end mode " << k << " does not decay (|z| = " << std::abs(zk) << ")";
      throw SingularSystemError(os.str());
    }
    z[k - 1] = zk;
  }
  return z;
}

Eigen::MatrixXcd face_closure(Complex a1, Complex a2, double h1, int n2) {
  const Eigen::VectorXcd z = face_decay_factors(a1, a2, h1, n2);
  Eigen::MatrixXd S(n2 - 1, n2 - 1);
  for (int j = 1; j < n2; ++j)
    for (int k = 1; k < n2; ++k) S(j - 1, k - 1) = std::sin(std::numbers::pi * k * j / n2);
  return (2.0 / n2) * (S.cast<Complex>() * z.asDiagonal() * S.cast<Complex>());
}

namespace {

struct Discretization {
  BoundaryGrid grid;
  Eigen::SparseMatrix<Complex> A;
  Eigen::VectorXcd b;
};

Discretization discretize(const Topography& topo, const ResolventProblem& p, double L) {
  BoundaryGrid grid(topo, -L, L, p.n1, p.n2);
  const Complex w(p.lambda, -p.epsilon);
  const Complex a1 = -w * w, a2 = 1.0 - w * w;
  const InteriorLayout lay{0, p.n1, p.n2};
  const Eigen::SparseMatrix<Complex> A0 = assemble_weighted_operator<Complex>(grid, a1, a2, 0, p.n1);
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(std::size_t(A0.nonZeros()) + 2 * std::size_t(p.n2) * p.n2);
  for (int col = 0; col < A0.outerSize(); ++col)
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(A0, col); it; ++it)
      trip.emplace_back(int(it.row()), int(it.col()), it.value());
  const Eigen::MatrixXcd Z = face_closure(a1, a2, grid.h1(), p.n2);
  const Complex e = a1 * kFlatDepth / (grid.h1() * grid.h1());
  for (int face : {0, p.n1})
    for (int j = 1; j < p.n2; ++j)
      for (int jj = 1; jj < p.n2; ++jj)
        trip.emplace_back(int(lay.index(face, j)), int(lay.index(face, jj)), e * Z(j - 1, jj - 1));
  Eigen::SparseMatrix<Complex> A(lay.unknowns(), lay.unknowns());
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXcd b(lay.unknowns());
  for (int i = 0; i <= p.n1; ++i)
    for (int j = 1; j < p.n2; ++j)
      b[lay.index(i, j)] = std::abs(grid.depth(i)) * p.source(grid.x1(i), grid.x2(i, j));
  return {std::move(grid), std::move(A), std::move(b)};
}

ResolventSolution solve_once(const Topography& topo, const ResolventProblem& p, double L) {
  Discretization d = discretize(topo, p, L);
  ResolventSolution out{WaveField(d.grid, p.lambda), complex_slope(p.lambda, p.epsilon), 0.0, {}};
  if (d.b.norm() == 0.0) return out;
  Eigen::UmfPackLU<Eigen::SparseMatrix<Complex>> lu;
  lu.compute(d.A);
  if (lu.info() != Eigen::Success)
    throw SingularSystemError("sparse LU failed; epsilon is too small for this grid");
  const Eigen::VectorXcd x = lu.solve(d.b);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw SingularSystemError("sparse LU solve failed");
  out.residual = (d.A * x - d.b).norm() / d.b.norm();
  const InteriorLayout lay{0, p.n1, p.n2};
  for (int i = 0; i <= p.n1; ++i)
    for (int j = 1; j < p.n2; ++j) out.field.at(i, j) = x[lay.index(i, j)];
  return out;
}

}  // namespace

ResolventSolution solve_resolvent(const Topography& topo, const ResolventProblem& p) {
  if (!(p.epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (p.epsilon < p.min_epsilon) {
    std::ostringstream os;
    os << "epsilon = " << p.epsilon << " is below the resolvable minimum " << p.min_epsilon;
    throw DomainError(os.str());
  }
  check_subcritical(topo, p.lambda);
  const double R0 = topo.support_radius();
  const double L = p.L > 0.0 ? p.L : R0 + 8.0;
  if (!(L > R0 + 2.0)) throw DomainError("truncation L must exceed R0 + 2");
  if (!p.source.empty()) {
    const SourceBox s = p.source.support();
    if (std::max(std::abs(s.x1_min), std::abs(s.x1_max)) >= L - 1.0)
      throw DomainError("source must vanish on |x1| >= L - 1");
  }
  ResolventSolution sol = solve_once(topo, p, L);
  if (p.check_refinement && !p.source.empty()) {
    ResolventProblem fine = p;
    fine.n1 = 2 * p.n1;
    const ResolventSolution f = solve_once(topo, fine, L);
    const BoundaryGrid& g = sol.field.grid;
    Eigen::VectorXcd diff(g.size());
    for (int i = 0; i <= g.n1(); ++i)
      for (int j = 0; j <= g.n2(); ++j)
        diff[g.index(i, j)] = sol.field.at(i, j) - f.field.at(2 * i, j);
    const double rel = h1_norm(g, diff) / h1_norm(g, sol.field.values);
    if (rel > p.refinement_tolerance) {
      std::ostringstream os;
      os << "doubling n1 changes the solution by " << rel << " in H1";
      sol.warnings.push_back({"RefinementWarning", os.str()});
    }
  }
  return sol;
}

LapSweep lap_sweep(const OutgoingResolvent& resolvent, const ResolventProblem& base,
                   const std::vector<double>& eps_list, const Cutoff& chi, int threads) {
  if (eps_list.empty()) throw DomainError("empty epsilon list");
  for (std::size_t k = 1; k < eps_list.size(); ++k)
    if (!(eps_list[k] < eps_list[k - 1])) throw DomainError("epsilon list must be decreasing");
  const Topography& topo = resolvent.channel().topography();
  ResolventProblem p = base;
  p.lambda = resolvent.channel().lambda();
  const double L = p.L > 0.0 ? p.L : topo.support_radius() + 8.0;
  p.L = L;

  LapSweep out;
  const BoundaryGrid grid(topo, -L, L, p.n1, p.n2);
  const OutgoingSolution sol = resolvent.solve(p.source, -L, L);
  out.warnings = sol.warnings;
  const Eigen::VectorXcd ref = sol.sample(grid, threads).values;
  out.reference_norm = h1_norm(grid, apply_cutoff(grid, ref, chi));

  Eigen::VectorXcd last;
  for (double eps : eps_list) {
    p.epsilon = eps;
    const ResolventSolution u = solve_resolvent(topo, p);
    out.warnings.insert(out.warnings.end(), u.warnings.begin(), u.warnings.end());
    out.rows.push_back({eps, h1_norm(grid, apply_cutoff(grid, u.field.values - ref, chi)),
                        h1_norm(grid, apply_cutoff(grid, u.field.values, chi))});
    last = u.field.values;
  }

  ResolventProblem coarse = p;
  coarse.n1 = p.n1 / 2;
  coarse.n2 = p.n2 / 2;
  const ResolventSolution uc = solve_resolvent(topo, coarse);
  const BoundaryGrid& cg = uc.field.grid;
  Eigen::VectorXcd diff(cg.size());
  for (int i = 0; i <= cg.n1(); ++i)
    for (int j = 0; j <= cg.n2(); ++j)
      diff[cg.index(i, j)] = uc.field.at(i, j) - last[grid.index(2 * i, 2 * j)];
  out.floor = h1_norm(cg, apply_cutoff(cg, diff, chi));
  return out;
}

}  // namespace subwave
