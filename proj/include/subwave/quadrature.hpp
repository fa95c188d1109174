#pragma once

#include <vector>

namespace subwave {

/// Gauss-Legendre rule on [-1, 1]; nodes ascending.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int order);
  int order() const noexcept { return int(nodes.size()); }

  /// integral_a^b f by the rule mapped affinely to [a, b].
  template <class F>
  auto integrate(double a, double b, F&& f) const -> decltype(f(0.0)) {
    using R = decltype(f(0.0));
    R sum{};
    if (!(b > a)) return sum;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return sum * half;
  }
};

}  // namespace subwave
