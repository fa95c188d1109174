#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "subwave/circle.hpp"
#include "subwave/geometry.hpp"

namespace subwave {

/// Axis-aligned box [x1_min, x1_max] x [x2_min, x2_max] in the (x1, x2) plane.
struct SourceBox {
  double x1_min = 0.0, x1_max = 0.0;
  double x2_min = 0.0, x2_max = 0.0;
  bool contains(double x1, double x2) const {
    return x1 >= x1_min && x1 <= x1_max && x2 >= x2_min && x2 <= x2_max;
  }
};

/// One compactly supported term of a source: f vanishes outside `box`.
struct SourcePiece {
  std::function<Complex(double, double)> f;
  SourceBox box;
};

/// Forcing profile f(x1, x2) as a finite sum of pieces, each supported in
/// its own box. Pieces are integrated separately, so a piece's smoothness
/// inside its box is all that matters for quadrature accuracy.
class SourceTerm {
 public:
  SourceTerm() = default;

  static SourceTerm zero() { return {}; }
  /// Any evaluator; throws DomainError if it is visibly nonzero on a ring of
  /// sample points just outside the box.
  static SourceTerm custom(std::function<Complex(double, double)> f, SourceBox box,
                           int smoothness = 0);
  /// sin(k x2) (1 - (x1/r)^2)^8 on |x1| <= r, x2 in [-pi, 0]; a single
  /// vertical mode of the flat channel with a C^7 envelope.
  static SourceTerm mode(int k = 1, double radius = 1.0, Complex amplitude = 1.0);
  /// a (1 - ((x1-p)/r1)^2)^8 (1 - ((x2-q)/r2)^2)^8 on its box.
  static SourceTerm bump(double p, double q, double r1, double r2, Complex amplitude = 1.0);
  /// Sum of `count` bumps with random centers, radii and complex amplitudes,
  /// kept clear of the bottom of `topo` and inside |x1| <= x1_reach.
  static SourceTerm random(const Topography& topo, int count, std::uint64_t seed,
                           double x1_reach = 2.0);

  Complex operator()(double x1, double x2) const;
  const std::vector<SourcePiece>& pieces() const noexcept { return pieces_; }
  bool empty() const noexcept { return pieces_.empty(); }
  /// Bounding box of all pieces (zero box when empty).
  SourceBox support() const;
  /// Continuity class C^k of the pieces (for regularity bookkeeping).
  int smoothness() const noexcept { return smoothness_; }
  std::string describe() const { return description_; }

  SourceTerm& operator+=(const SourceTerm& other);
  friend SourceTerm operator+(SourceTerm a, const SourceTerm& b) { return a += b; }
  friend SourceTerm operator*(Complex s, const SourceTerm& a);

 private:
  std::vector<SourcePiece> pieces_;
  int smoothness_ = 1000;
  std::string description_ = "zero";
};

/// Throws SupportError if some piece box leaves the closed channel (dips
/// below G or above 0) or reaches beyond |x1| <= R0 + 1.
void check_source_support(const SourceTerm& f, const Topography& topo);

}  // namespace subwave
