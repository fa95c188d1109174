#include "subwave/grid.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace subwave {

BoundaryGrid::BoundaryGrid(const Topography& topo, double x1_min, double x1_max, int n1,
                           int n2)
    : topo_(topo), x1_min_(x1_min), x1_max_(x1_max), n1_(n1), n2_(n2) {
  if (!(x1_max > x1_min) || n1 < 2 || n2 < 2)
    throw DomainError("boundary grid needs x1_max > x1_min and n1, n2 >= 2");
  h1_ = (x1_max - x1_min) / n1;
  hs_ = 1.0 / n2;
  depth_.resize(n1 + 1);
  slope_.resize(n1 + 1);
  for (int i = 0; i <= n1; ++i) {
    depth_[i] = topo.depth(x1(i));
    slope_[i] = topo.slope(x1(i));
  }
}

double Cutoff::operator()(double x1) const {
  const double r = std::abs(x1 - center);
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  const double t = (r - inner) / (outer - inner);
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}

GridGradient grid_gradient(const BoundaryGrid& g, const Eigen::VectorXcd& u) {
  const int n1 = g.n1(), n2 = g.n2();
  GridGradient out{Eigen::VectorXcd(g.size()), Eigen::VectorXcd(g.size())};
  const auto d1 = [&](int i, int j) -> Complex {
    if (i == 0)
      return (-3.0 * u[g.index(0, j)] + 4.0 * u[g.index(1, j)] - u[g.index(2, j)]) / (2 * g.h1());
    if (i == n1)
      return (3.0 * u[g.index(n1, j)] - 4.0 * u[g.index(n1 - 1, j)] + u[g.index(n1 - 2, j)]) /
             (2 * g.h1());
    return (u[g.index(i + 1, j)] - u[g.index(i - 1, j)]) / (2 * g.h1());
  };
  const auto ds = [&](int i, int j) -> Complex {
    if (j == 0)
      return (-3.0 * u[g.index(i, 0)] + 4.0 * u[g.index(i, 1)] - u[g.index(i, 2)]) / (2 * g.hs());
    if (j == n2)
      return (3.0 * u[g.index(i, n2)] - 4.0 * u[g.index(i, n2 - 1)] + u[g.index(i, n2 - 2)]) /
             (2 * g.hs());
    return (u[g.index(i, j + 1)] - u[g.index(i, j - 1)]) / (2 * g.hs());
  };
  for (int i = 0; i <= n1; ++i) {
    const double G = g.depth(i), Gp = g.slope(i);
    for (int j = 0; j <= n2; ++j) {
      const Complex us = ds(i, j);
      out.dx1[g.index(i, j)] = d1(i, j) - g.sigma(j) * Gp / G * us;
      out.dx2[g.index(i, j)] = us / G;
    }
  }
  return out;
}

namespace {
double weighted_sum(const BoundaryGrid& g, const Eigen::VectorXd& density) {
  double sum = 0.0;
  for (int i = 0; i <= g.n1(); ++i) {
    const double wi = (i == 0 || i == g.n1()) ? 0.5 : 1.0;
    double col = 0.0;
    for (int j = 0; j <= g.n2(); ++j) {
      const double wj = (j == 0 || j == g.n2()) ? 0.5 : 1.0;
      col += wj * density[g.index(i, j)];
    }
    sum += wi * col * std::abs(g.depth(i));
  }
  return sum * g.h1() * g.hs();
}
}  // namespace

double l2_norm(const BoundaryGrid& g, const Eigen::VectorXcd& u) {
  return std::sqrt(weighted_sum(g, u.cwiseAbs2()));
}

double h1_norm(const BoundaryGrid& g, const Eigen::VectorXcd& u) {
  const GridGradient grad = grid_gradient(g, u);
  const Eigen::VectorXd density = u.cwiseAbs2() + grad.dx1.cwiseAbs2() + grad.dx2.cwiseAbs2();
  return std::sqrt(weighted_sum(g, density));
}

Eigen::VectorXcd apply_cutoff(const BoundaryGrid& g, const Eigen::VectorXcd& u,
                              const Cutoff& chi) {
  Eigen::VectorXcd out = u;
  for (int i = 0; i <= g.n1(); ++i) {
    const double w = chi(g.x1(i));
    for (int j = 0; j <= g.n2(); ++j) out[g.index(i, j)] *= w;
  }
  return out;
}

namespace {

struct StencilEntry {
  int di, dj;
  Complex coef;
};

// Nine-point stencil of |G| L_h at node (i, j); works for any i, including
// neighbors beyond the grid, by evaluating the topography directly.
std::array<StencilEntry, 9> weighted_stencil(const BoundaryGrid& g, Complex a1, Complex a2,
                                             int i, int j) {
  const Topography& topo = g.topography();
  const auto G = [&](int ii) {
    return (ii >= 0 && ii <= g.n1()) ? g.depth(ii) : topo.depth(g.x1(ii));
  };
  const auto Gp = [&](int ii) {
    return (ii >= 0 && ii <= g.n1()) ? g.slope(ii) : topo.slope(g.x1(ii));
  };
  const double h1 = g.h1(), hs = g.hs();
  const double absG = std::abs(G(i));
  const Complex k11p = a1 * 0.5 * (absG + std::abs(G(i + 1)));
  const Complex k11m = a1 * 0.5 * (absG + std::abs(G(i - 1)));
  const double sp = g.sigma(j) + 0.5 * hs, sm = g.sigma(j) - 0.5 * hs;
  const double gp2 = Gp(i) * Gp(i);
  const Complex k22p = (a1 * sp * sp * gp2 + a2) / absG;
  const Complex k22m = (a1 * sm * sm * gp2 + a2) / absG;
  const auto k12 = [&](int ii, int jj) { return a1 * g.sigma(jj) * Gp(ii); };
  const double c = 1.0 / (4.0 * h1 * hs);
  const Complex e10 = k11p / (h1 * h1), em10 = k11m / (h1 * h1);
  const Complex e01 = k22p / (hs * hs), e0m1 = k22m / (hs * hs);
  return {{{1, 0, e10},
           {-1, 0, em10},
           {0, 1, e01},
           {0, -1, e0m1},
           {0, 0, -(e10 + em10 + e01 + e0m1)},
           {1, 1, c * (k12(i + 1, j) + k12(i, j + 1))},
           {-1, -1, c * (k12(i - 1, j) + k12(i, j - 1))},
           {1, -1, -c * (k12(i + 1, j) + k12(i, j - 1))},
           {-1, 1, -c * (k12(i - 1, j) + k12(i, j + 1))}}};
}

template <class Scalar>
Scalar cast_scalar(Complex v) {
  if constexpr (std::is_same_v<Scalar, double>)
    return v.real();
  else
    return v;
}

}  // namespace

template <class Scalar>
Eigen::SparseMatrix<Scalar> assemble_weighted_operator(const BoundaryGrid& g, Scalar a1,
                                                       Scalar a2, int i_begin, int i_end) {
  if (i_begin < 0 || i_end > g.n1() || i_begin > i_end)
    throw DomainError("operator column range outside the grid");
  const InteriorLayout lay{i_begin, i_end, g.n2()};
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(std::size_t(lay.unknowns()) * 9);
  for (int i = i_begin; i <= i_end; ++i)
    for (int j = 1; j < g.n2(); ++j) {
      const auto st = weighted_stencil(g, Complex(a1), Complex(a2), i, j);
      for (const auto& e : st) {
        const int ii = i + e.di, jj = j + e.dj;
        if (ii < i_begin || ii > i_end || jj < 1 || jj >= g.n2()) continue;
        if (e.coef == Complex(0.0)) continue;
        trip.emplace_back(lay.index(i, j), lay.index(ii, jj), cast_scalar<Scalar>(e.coef));
      }
    }
  Eigen::SparseMatrix<Scalar> A(lay.unknowns(), lay.unknowns());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

template Eigen::SparseMatrix<double> assemble_weighted_operator<double>(const BoundaryGrid&,
                                                                        double, double, int,
                                                                        int);
template Eigen::SparseMatrix<Complex> assemble_weighted_operator<Complex>(const BoundaryGrid&,
                                                                          Complex, Complex,
                                                                          int, int);

Eigen::VectorXcd apply_operator(const BoundaryGrid& g, Complex a1, Complex a2,
                                const Eigen::VectorXcd& u) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(g.size());
  for (int i = 1; i < g.n1(); ++i)
    for (int j = 1; j < g.n2(); ++j) {
      Complex sum = 0.0;
      for (const auto& e : weighted_stencil(g, a1, a2, i, j))
        sum += e.coef * u[g.index(i + e.di, j + e.dj)];
      out[g.index(i, j)] = sum / std::abs(g.depth(i));
    }
  return out;
}

Eigen::VectorXcd surface_normal_derivative(const BoundaryGrid& g, const Eigen::VectorXcd& u) {
  if (g.n2() < 6) {
    std::ostringstream os;
    os << "sixth-order surface stencil needs n2 >= 6, grid has n2 = " << g.n2();
    throw StencilError(os.str());
  }
  static constexpr double w[7] = {-49.0 / 20.0, 6.0, -15.0 / 2.0, 20.0 / 3.0,
                                  -15.0 / 4.0,  6.0 / 5.0, -1.0 / 6.0};
  Eigen::VectorXcd out(g.n1() + 1);
  for (int i = 0; i <= g.n1(); ++i) {
    Complex d = 0.0;
    for (int m = 0; m < 7; ++m) d += w[m] * u[g.index(i, m)];
    out[i] = d / (g.hs() * g.depth(i));
  }
  return out;
}

}  // namespace subwave
