#include "subwave/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>

#include "subwave/errors.hpp"

namespace subwave {

GaussLegendre::GaussLegendre(int order) {
  if (order < 1) throw DomainError("Gauss-Legendre order must be positive");
  // Boost returns the nonnegative zeros; mirror them.
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(order);
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime<double>(order, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes.push_back(z);
    weights.push_back(w);
    if (z != 0.0) {
      nodes.push_back(-z);
      weights.push_back(w);
    }
  }
  std::vector<std::size_t> perm(nodes.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return nodes[a] < nodes[b]; });
  std::vector<double> n2, w2;
  for (auto p : perm) {
    n2.push_back(nodes[p]);
    w2.push_back(weights[p]);
  }
  nodes = std::move(n2);
  weights = std::move(w2);
}

}  // namespace subwave
