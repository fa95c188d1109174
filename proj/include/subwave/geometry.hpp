#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "subwave/circle.hpp"

namespace subwave {

/// Depth of the flat ends of the channel: G = -kFlatDepth outside [-R0, R0].
inline constexpr double kFlatDepth = std::numbers::pi;

enum class TopographyKind { flat, gaussian_bump, spline };

/// Bottom profile G(x1) < 0 of the channel {G(x1) < x2 < 0}.
///
/// gaussian_bump: G = -pi + A exp(-((x1 - xc)/w)^2), cut to exactly -pi once
/// the exponential drops below 1e-18 (well under one ulp of pi), which fixes
/// the support radius R0.
///
/// spline: uniform cubic B-spline interpolating the given knot values. The
/// B-spline basis is C^2 and compactly supported, so the profile joins the
/// flat ends with matching second derivative; R0 extends two knot spacings
/// past the outer knots.
class Topography {
 public:
  static Topography flat();
  static Topography gaussian_bump(double amplitude, double width = 1.0,
                                  double center = 0.0);
  static Topography spline(std::vector<double> knots,
                           std::vector<double> values);

  TopographyKind kind() const noexcept { return kind_; }
  double depth(double x1) const;      // G(x1)
  double slope(double x1) const;      // G'(x1)
  double curvature(double x1) const;  // G''(x1)

  double support_radius() const noexcept { return support_radius_; }
  /// max over x1 of -G(x1); bounds the vertical extent of the channel.
  double max_depth() const noexcept { return max_depth_; }
  double min_depth() const noexcept { return min_depth_; }

  /// Canonical one-line description; identical profiles give identical text.
  std::string describe() const;

  double amplitude() const noexcept { return amplitude_; }
  double width() const noexcept { return width_; }
  double center() const noexcept { return center_; }
  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  Topography() = default;
  void finalize_extent();

  TopographyKind kind_ = TopographyKind::flat;
  double amplitude_ = 0.0;
  double width_ = 1.0;
  double center_ = 0.0;
  double cut_ = 0.0;  // gaussian cutoff in units of width
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> bspline_coeffs_;
  double knot_spacing_ = 0.0;
  double support_radius_ = 0.0;
  double max_depth_ = kFlatDepth;
  double min_depth_ = kFlatDepth;
};

/// Slope c(lambda) = sqrt(1 - lambda^2) / lambda of the characteristics.
double characteristic_slope(double lambda);

struct ChannelParams {
  double lambda = 0.0;
  double c = 0.0;
  double max_slope = 0.0;  // max |G'|
  double subcritical_margin = 0.0;  // 1 - max|G'| / c
  double M = 0.0;  // flat-region threshold in x1
};

/// Throws DomainError unless lambda in (0,1) and SupercriticalError unless
/// max|G'| < c(lambda). max|G'| is a global maximum: dense sampling followed
/// by golden-section refinement around the best sample.
ChannelParams check_subcritical(const Topography& topo, double lambda);

/// Bottom abscissa s with s + G(s)/c = x1 (same l+ level set as (x1, 0)).
double gamma_plus(const ChannelParams& params, const Topography& topo,
                  double x1);
/// Bottom abscissa s with s - G(s)/c = x1.
double gamma_minus(const ChannelParams& params, const Topography& topo,
                   double x1);
/// Single-bounce chess billiard b = gamma^- o gamma^+ on the upper boundary.
double billiard(const ChannelParams& params, const Topography& topo,
                double x1);
double billiard_derivative(const ChannelParams& params,
                           const Topography& topo, double x1);
/// b^{-1} = gamma^+ o gamma^-.
double billiard_inverse(const ChannelParams& params, const Topography& topo,
                        double x1);

/// J_L = [theta0, theta0 + 2pi), J_R = [theta_R0, theta_R0 + 2pi) in
/// theta-units (theta = c x1 on the upper boundary), J_R = b^N(J_L).
struct FundamentalIntervals {
  double theta0 = 0.0;
  double theta_R0 = 0.0;
  int N = 0;
};

FundamentalIntervals find_fundamental_intervals(const ChannelParams& params,
                                                const Topography& topo,
                                                int max_bounces = 1'000'000);

/// beta(phi) = b^N(theta0 + phi) - theta_R0 reduced to [0, 2pi), with its
/// derivative (product of b' along the orbit).
CirclePoint circle_map(const FundamentalIntervals& fi,
                       const ChannelParams& params, const Topography& topo,
                       double phi);

/// A subcritical channel at fixed frequency with its billiard dynamics in
/// theta-units, where the flat-region bounce is exactly theta -> theta + 2pi.
class Channel {
 public:
  Channel(Topography topo, double lambda);

  const Topography& topography() const noexcept { return topo_; }
  const ChannelParams& params() const noexcept { return params_; }
  const FundamentalIntervals& intervals() const noexcept { return fi_; }
  double lambda() const noexcept { return params_.lambda; }
  double c() const noexcept { return params_.c; }

  double bounce(double theta) const;
  double bounce_derivative(double theta) const;
  double bounce_inverse(double theta) const;
  /// b^k for any integer k (negative k iterates the inverse).
  double iterate(double theta, int k) const;
  /// (b^k)' for k >= 0 and k < 0.
  double iterate_derivative(double theta, int k) const;

  /// Index k of the tile b^k(J_L) containing theta, and the base point
  /// b^{-k}(theta) in J_L.
  struct TileLocation {
    int tile = 0;
    double base = 0.0;
  };
  TileLocation locate_tile(double theta) const;

  /// Lift of the multi-bounce circle map: lift(phi + 2pi) = lift(phi) + 2pi
  /// and lift(0) = 0.
  CirclePoint circle_lift(double phi) const;
  CircleMap circle_map() const;
  CircleMap inverse_circle_map() const;

 private:
  Topography topo_;
  ChannelParams params_;
  FundamentalIntervals fi_;
};

}  // namespace subwave
