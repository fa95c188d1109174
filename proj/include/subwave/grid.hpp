#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>

#include "subwave/circle.hpp"
#include "subwave/geometry.hpp"

namespace subwave {

/// Boundary-fitted mesh of {x1_min <= x1 <= x1_max} within the channel:
/// x1 uniform with n1 intervals, sigma = x2 / G(x1) uniform on [0, 1] with n2
/// intervals (sigma = 0 is the surface, sigma = 1 the bottom). Node (i, j)
/// is stored at index i * (n2 + 1) + j.
class BoundaryGrid {
 public:
  BoundaryGrid(const Topography& topo, double x1_min, double x1_max, int n1, int n2);

  const Topography& topography() const noexcept { return topo_; }
  double x1_min() const noexcept { return x1_min_; }
  double x1_max() const noexcept { return x1_max_; }
  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  double h1() const noexcept { return h1_; }
  double hs() const noexcept { return hs_; }
  Eigen::Index size() const noexcept { return Eigen::Index(n1_ + 1) * (n2_ + 1); }
  Eigen::Index index(int i, int j) const noexcept { return Eigen::Index(i) * (n2_ + 1) + j; }

  double x1(int i) const noexcept { return x1_min_ + h1_ * i; }
  double sigma(int j) const noexcept { return hs_ * j; }
  double depth(int i) const noexcept { return depth_[i]; }  // G(x1_i)
  double slope(int i) const noexcept { return slope_[i]; }  // G'(x1_i)
  double x2(int i, int j) const noexcept { return sigma(j) * depth_[i]; }

 private:
  Topography topo_;
  double x1_min_, x1_max_;
  int n1_, n2_;
  double h1_, hs_;
  std::vector<double> depth_, slope_;
};

/// Smooth cutoff in x1: 1 on |x1 - center| <= inner, 0 beyond outer, with a
/// C-infinity transition.
struct Cutoff {
  double inner = 3.0;
  double outer = 4.0;
  double center = 0.0;
  double operator()(double x1) const;
};

/// Complex field sampled on a boundary-fitted grid.
struct WaveField {
  BoundaryGrid grid;
  Eigen::VectorXcd values;
  double lambda = 0.0;

  WaveField(BoundaryGrid g, double lam)
      : grid(std::move(g)), values(Eigen::VectorXcd::Zero(grid.size())), lambda(lam) {}
  Complex& at(int i, int j) { return values[grid.index(i, j)]; }
  Complex at(int i, int j) const { return values[grid.index(i, j)]; }
};

/// Physical gradient of grid data by second-order differences in (x1, sigma)
/// and the chain rule d/dx1 = d1 - sigma G'/G d_sigma, d/dx2 = d_sigma / G.
struct GridGradient {
  Eigen::VectorXcd dx1;
  Eigen::VectorXcd dx2;
};
GridGradient grid_gradient(const BoundaryGrid& grid, const Eigen::VectorXcd& u);

/// (int |u|^2 dx)^{1/2} over the grid region (trapezoidal, area element |G|).
double l2_norm(const BoundaryGrid& grid, const Eigen::VectorXcd& u);
/// (int |u|^2 + |grad u|^2 dx)^{1/2}.
double h1_norm(const BoundaryGrid& grid, const Eigen::VectorXcd& u);
/// Multiplies every column x1_i by chi(x1_i).
Eigen::VectorXcd apply_cutoff(const BoundaryGrid& grid, const Eigen::VectorXcd& u,
                              const Cutoff& chi);

/// Samples a function of (x1, x2) at the grid nodes.
template <class F>
Eigen::VectorXcd sample_on_grid(const BoundaryGrid& grid, F&& f) {
  Eigen::VectorXcd v(grid.size());
  for (int i = 0; i <= grid.n1(); ++i)
    for (int j = 0; j <= grid.n2(); ++j) v[grid.index(i, j)] = f(grid.x1(i), grid.x2(i, j));
  return v;
}

/// Second-order conservative discretization of div(A grad u), A = diag(a1, a2)
/// constant, in the boundary-fitted coordinates:
///   L U = (1/|G|) [d1(K11 U_1 + K12 U_s) + d_s(K12 U_1 + K22 U_s)],
///   K11 = |G| a1, K12 = a1 sigma G', K22 = (a1 sigma^2 G'^2 + a2) / |G|.
/// Rows and columns are the nodes with 1 <= j <= n2 - 1 and i_begin <= i <=
/// i_end (the caller chooses whether x1-faces are unknowns). References to
/// columns outside [i_begin, i_end] are dropped (homogeneous Dirichlet), and
/// the Dirichlet rows j = 0, n2 are never unknowns. The returned matrix is
/// |G| L_h, which is symmetric.
template <class Scalar>
Eigen::SparseMatrix<Scalar> assemble_weighted_operator(const BoundaryGrid& grid, Scalar a1,
                                                       Scalar a2, int i_begin, int i_end);

/// Unknown numbering used by assemble_weighted_operator.
struct InteriorLayout {
  int i_begin = 0;
  int i_end = 0;
  int n2 = 0;
  Eigen::Index unknowns() const { return Eigen::Index(i_end - i_begin + 1) * (n2 - 1); }
  Eigen::Index index(int i, int j) const { return Eigen::Index(i - i_begin) * (n2 - 1) + (j - 1); }
};

/// Applies the (unweighted) discrete operator L_h to full-grid data; rows on
/// the grid edges are left zero.
Eigen::VectorXcd apply_operator(const BoundaryGrid& grid, Complex a1, Complex a2,
                                const Eigen::VectorXcd& u);

/// d u / d x2 at the surface row by a one-sided sixth-order stencil in sigma.
/// Throws StencilError when n2 < 6.
Eigen::VectorXcd surface_normal_derivative(const BoundaryGrid& grid, const Eigen::VectorXcd& u);

}  // namespace subwave
