#pragma once

#include <functional>
#include <vector>

#include "subwave/circle.hpp"
#include "subwave/geometry.hpp"
#include "subwave/grid.hpp"
#include "subwave/quadrature.hpp"
#include "subwave/scattering.hpp"
#include "subwave/source.hpp"

namespace subwave {

struct StationaryOptions {
  int K = 256;
  int quad_order = 32;
  double quad_tolerance = 1e-9;        // QuadratureWarning threshold on g
  double continuity_tolerance = 1e-8;  // ContinuityError threshold for omega
  double mean_tolerance = 1e-8;        // runtime check on the mean of the transport data
  double cond_cap = 1e8;
  int threads = 1;
};

/// Trace g on the surface in theta-units with its theta-derivative, vanishing
/// outside [theta_min, theta_max].
struct TraceFunction {
  std::function<Complex(double)> g;
  std::function<Complex(double)> dg;
  double theta_min = 0.0;
  double theta_max = 0.0;
};

/// Particular solution U0 of P(lambda) U0 = f on the whole plane with f
/// extended by zero:
///   U0(x) = kappa * integral of f over {x2' <= x2 - c |x1' - x1|},
///   kappa = 1 / (2 lambda sqrt(1 - lambda^2)).
/// Each source piece is integrated in (x1, x2) by tensor Gauss-Legendre, with
/// the outer interval split where the cone boundary crosses the top of the
/// piece box.
class IncidentField {
 public:
  IncidentField(SourceTerm f, const ChannelParams& params, int order = 32);

  Complex operator()(double x1, double x2) const;
  Complex dx1(double x1, double x2) const;
  Complex dx2(double x1, double x2) const;

  /// g(theta) = U0(theta / c, 0) and dg/dtheta.
  Complex trace(double theta) const { return (*this)(theta / c_, 0.0); }
  Complex trace_derivative(double theta) const { return dx1(theta / c_, 0.0) / c_; }
  /// supp g lies in [c x1_min + x2_min, c x1_max - x2_min] of the source box.
  double trace_min() const noexcept { return trace_min_; }
  double trace_max() const noexcept { return trace_max_; }
  TraceFunction trace_function() const;

  /// U0 vanishes outside this box in x1 (and for x2 below the source).
  double x1_min() const noexcept { return x1_min_; }
  double x1_max() const noexcept { return x1_max_; }

  const SourceTerm& source() const noexcept { return f_; }
  double lambda() const noexcept { return lambda_; }
  double c() const noexcept { return c_; }
  int order() const noexcept { return rule_.order(); }
  /// Same field with the quadrature order doubled.
  IncidentField refined() const;

 private:
  Complex cone_line_integral(double x1, double x2, int side) const;

  SourceTerm f_;
  double lambda_, c_, kappa_;
  GaussLegendre rule_;
  double trace_min_ = 0.0, trace_max_ = 0.0;
  double x1_min_ = 0.0, x1_max_ = 0.0;
};

/// sup |g_order - g_2order| over `samples` points of supp g.
double trace_refinement_defect(const IncidentField& U0, int samples = 256);

/// Transport data  bold g = -sum_{k=1}^{N} (b^k)^* dg  restricted to J_L, as a
/// form of order K sampled on 8K nodes. Throws SupportError unless supp g
/// lies inside b^1(J_L) u ... u b^N(J_L), and DomainError if the mean
/// exceeds `mean_tolerance`.
struct TransportData {
  CircleForm form;
  double mean_defect = 0.0;
  double discarded_fraction = 0.0;
};
TransportData transport_data(const TraceFunction& g, const Channel& channel, int K,
                             double mean_tolerance = 1e-8);

/// (v_L, v_R) = (v_L0 + bold g, v_R0) where (v_L0, v_R0) is the homogeneous
/// solution with incoming data -Pi^+ bold g. Satisfies v_L - b^* v_R = bold g,
/// Pi^+ v_L = 0 and Pi^- v_R = 0.
BoundaryPair solve_outgoing_data(const CircleForm& transport_g,
                                 const ScatteringAssembly& assembly);

/// Tabulated primitive omega on a window of the surface, built tile by tile
/// over b^k(J_L): omega' = v_L on J_L (omega(theta0) = 0),
/// omega(b theta) = omega(theta) + g(b theta) to the right and the inverse
/// relation to the left. Cubic Hermite interpolation between nodes.
class OmegaTable {
 public:
  Complex value(double theta) const;
  Complex derivative(double theta) const;  // d omega / d theta
  double theta_min() const noexcept { return theta_.front(); }
  double theta_max() const noexcept { return theta_.back(); }
  int first_tile() const noexcept { return first_tile_; }
  int last_tile() const noexcept { return last_tile_; }
  /// Largest jump between adjacent tiles at their common endpoint.
  double max_jump() const noexcept { return max_jump_; }
  std::size_t size() const noexcept { return theta_.size(); }

 private:
  friend OmegaTable build_omega(const CircleForm&, const TraceFunction&, const Channel&, double,
                                double, int, double);
  std::size_t locate(double theta) const;

  std::vector<double> theta_;
  std::vector<Complex> value_;
  std::vector<Complex> deriv_;
  int first_tile_ = 0, last_tile_ = 0;
  double max_jump_ = 0.0;
};

/// Throws ContinuityError if a tile jump exceeds `continuity_tolerance`.
/// nodes_per_tile = 0 selects 8K.
OmegaTable build_omega(const CircleForm& v_L, const TraceFunction& g, const Channel& channel,
                       double theta_min, double theta_max, int nodes_per_tile = 0,
                       double continuity_tolerance = 1e-8);

/// u(x) = U0(x) - omega(c x1 + x2) - g(c x1 - x2) + omega(c x1 - x2).
/// Throws WindowError if a characteristic leaves the omega table.
Complex outgoing_field_value(const IncidentField& U0, const OmegaTable& omega, double x1,
                             double x2);
WaveField reconstruct_field(const IncidentField& U0, const OmegaTable& omega,
                            const BoundaryGrid& grid, int threads = 1);

/// Neumann data v^ = 1/2 d_{x2} u d theta on the surface: coefficient of
/// d theta at each grid column, by the sixth-order surface stencil.
Eigen::VectorXcd neumann_data(const WaveField& field);
/// Same quantity from the analytic representation.
Complex neumann_value(const IncidentField& U0, const OmegaTable& omega, double theta);
/// Neumann form of order K on a field whose grid spans exactly one period
/// 2 pi / c in x1 (n1 >= 4K + 4 intervals).
CircleForm neumann_form(const WaveField& field, int K);
/// Grid over the fundamental interval starting at theta_start.
BoundaryGrid fundamental_grid(const Channel& channel, double theta_start, int n1, int n2);

struct OutgoingDiagnostics {
  double transport_residual = 0.0;   // ||v_L - b^* v_R - bold g||_{L2}, inner band
  double transport_residual_full = 0.0;  // same over all K modes
  double outgoing_defect_L = 0.0;    // ||Pi^+ v_L||_{L2}
  double outgoing_defect_R = 0.0;    // ||Pi^- v_R||_{L2}
  double mean_defect = 0.0;
  double quadrature_defect = 0.0;
  double omega_jump = 0.0;
};

struct OutgoingSolution {
  IncidentField U0;
  CircleForm transport_g;
  BoundaryPair v;
  OmegaTable omega;
  OutgoingDiagnostics diagnostics;
  Warnings warnings;

  Complex operator()(double x1, double x2) const {
    return outgoing_field_value(U0, omega, x1, x2);
  }
  WaveField sample(const BoundaryGrid& grid, int threads = 1) const {
    return reconstruct_field(U0, omega, grid, threads);
  }
};

/// The outgoing resolvent R(lambda) of a subcritical channel. The scattering
/// assembly is built once; each solve then costs quadratures and a K x K
/// matrix-vector product.
class OutgoingResolvent {
 public:
  explicit OutgoingResolvent(Channel channel, StationaryOptions options = {});

  const Channel& channel() const noexcept { return channel_; }
  const ScatteringAssembly& scattering() const noexcept { return assembly_; }
  const StationaryOptions& options() const noexcept { return options_; }

  /// Solves for u = R(lambda) f with the omega table covering every
  /// characteristic through x1 in [x1_min, x1_max], J_L and J_R.
  OutgoingSolution solve(const SourceTerm& f, double x1_min, double x1_max) const;

 private:
  Channel channel_;
  StationaryOptions options_;
  ScatteringAssembly assembly_;
};

}  // namespace subwave
