#include "subwave/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "subwave/parallel.hpp"

namespace subwave {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Segment {
  double a, b;
  bool cone;  // upper limit follows the cone boundary, otherwise the box top
};

// Outer x1' segments of {x2' <= x2 - c|x1' - x1|} meeting the box, clipped.
int cone_segments(const SourceBox& box, double c, double x1, double x2, Segment out[3]) {
  if (x2 <= box.x2_min) return 0;
  const double rb = (x2 - box.x2_min) / c;
  const double rt = std::max(0.0, (x2 - box.x2_max) / c);
  const Segment raw[3] = {{x1 - rb, x1 - rt, true}, {x1 - rt, x1 + rt, false},
                          {x1 + rt, x1 + rb, true}};
  int n = 0;
  for (const auto& s : raw) {
    const double a = std::max(s.a, box.x1_min), b = std::min(s.b, box.x1_max);
    if (b > a) out[n++] = {a, b, s.cone};
  }
  return n;
}
}  // namespace

IncidentField::IncidentField(SourceTerm f, const ChannelParams& params, int order)
    : f_(std::move(f)),
      lambda_(params.lambda),
      c_(params.c),
      kappa_(1.0 / (2.0 * params.lambda * std::sqrt(1.0 - params.lambda * params.lambda))),
      rule_(order) {
  if (f_.empty()) return;
  const SourceBox s = f_.support();
  trace_min_ = c_ * s.x1_min + s.x2_min;
  trace_max_ = c_ * s.x1_max - s.x2_min;
  x1_min_ = s.x1_min + std::min(0.0, s.x2_min) / c_;
  x1_max_ = s.x1_max - std::min(0.0, s.x2_min) / c_;
}

IncidentField IncidentField::refined() const {
  return IncidentField(f_, ChannelParams{lambda_, c_, 0.0, 0.0, 0.0}, 2 * rule_.order());
}

Complex IncidentField::operator()(double x1, double x2) const {
  Complex total = 0.0;
  Segment seg[3];
  for (const auto& piece : f_.pieces()) {
    const SourceBox& box = piece.box;
    const int n = cone_segments(box, c_, x1, x2, seg);
    for (int s = 0; s < n; ++s) {
      const bool cone = seg[s].cone;
      total += rule_.integrate(seg[s].a, seg[s].b, [&](double y1) {
        const double top = cone ? x2 - c_ * std::abs(y1 - x1) : box.x2_max;
        return rule_.integrate(box.x2_min, top, [&](double y2) { return piece.f(y1, y2); });
      });
    }
  }
  return kappa_ * total;
}

// Integral of f along the right (side = +1) or left (side = -1) cone edge
// x2' = x2 - c |x1' - x1|, parametrized by x1'.
Complex IncidentField::cone_line_integral(double x1, double x2, int side) const {
  Complex total = 0.0;
  Segment seg[3];
  for (const auto& piece : f_.pieces()) {
    const SourceBox& box = piece.box;
    const int n = cone_segments(box, c_, x1, x2, seg);
    for (int s = 0; s < n; ++s) {
      if (!seg[s].cone || (side > 0) != (seg[s].a >= x1)) continue;
      total += rule_.integrate(seg[s].a, seg[s].b, [&](double y1) {
        return piece.f(y1, x2 - c_ * std::abs(y1 - x1));
      });
    }
  }
  return total;
}

Complex IncidentField::dx1(double x1, double x2) const {
  return kappa_ * c_ * (cone_line_integral(x1, x2, 1) - cone_line_integral(x1, x2, -1));
}

Complex IncidentField::dx2(double x1, double x2) const {
  return kappa_ * (cone_line_integral(x1, x2, 1) + cone_line_integral(x1, x2, -1));
}

TraceFunction IncidentField::trace_function() const {
  auto self = std::make_shared<IncidentField>(*this);
  return {[self](double t) { return self->trace(t); },
          [self](double t) { return self->trace_derivative(t); }, trace_min_, trace_max_};
}

double trace_refinement_defect(const IncidentField& U0, int samples) {
  if (U0.source().empty()) return 0.0;
  const IncidentField fine = U0.refined();
  double worst = 0.0;
  for (int m = 0; m <= samples; ++m) {
    const double t = U0.trace_min() + (U0.trace_max() - U0.trace_min()) * m / samples;
    worst = std::max(worst, std::abs(U0.trace(t) - fine.trace(t)));
  }
  return worst;
}

TransportData transport_data(const TraceFunction& g, const Channel& channel, int K,
                             double mean_tolerance) {
  const auto& fi = channel.intervals();
  const bool empty = !(g.theta_max > g.theta_min);
  if (!empty && (g.theta_min <= fi.theta0 + kTwoPi || g.theta_max >= fi.theta_R0 + kTwoPi)) {
    std::ostringstream os;
    os << "trace support [" << g.theta_min << ", " << g.theta_max
       << "] not inside b(J_L) .. b^N(J_L) = (" << fi.theta0 + kTwoPi << ", "
       << fi.theta_R0 + kTwoPi << ")";
    throw SupportError(os.str());
  }
  const int n = 8 * K;
  std::vector<Complex> samples(n, 0.0);
  if (!empty)
    for (int m = 0; m < n; ++m) {
      double theta = fi.theta0 + kTwoPi * m / n, d = 1.0;
      Complex acc = 0.0;
      for (int k = 1; k <= fi.N; ++k) {
        d *= channel.bounce_derivative(theta);
        theta = channel.bounce(theta);
        if (theta > g.theta_min && theta < g.theta_max) acc += g.dg(theta) * d;
      }
      samples[m] = -acc;
    }
  const SampledForm s = from_samples(samples, K);
  double scale = 1.0;
  for (const auto& v : samples) scale = std::max(scale, std::abs(v));
  if (s.mean_defect > mean_tolerance * scale) {
    std::ostringstream os;
    os << "transport data has mean " << s.mean_defect << "; compactly supported g gives zero";
    throw DomainError(os.str());
  }
  return {s.form, s.mean_defect, s.discarded_fraction};
}

BoundaryPair solve_outgoing_data(const CircleForm& transport_g,
                                 const ScatteringAssembly& assembly) {
  const CircleForm g_in = -1.0 * project(transport_g, Sign::plus);
  BoundaryPair v = solve_homogeneous_data(assembly, g_in);
  v.v_L += transport_g;
  return v;
}

std::size_t OmegaTable::locate(double theta) const {
  if (!(theta >= theta_.front() && theta <= theta_.back())) {
    std::ostringstream os;
    os << "theta = " << theta << " outside the omega window [" << theta_.front() << ", "
       << theta_.back() << "]";
    throw WindowError(os.str());
  }
  const auto it = std::upper_bound(theta_.begin(), theta_.end(), theta);
  return std::min<std::size_t>(std::size_t(it - theta_.begin()), theta_.size() - 1) - 1;
}

Complex OmegaTable::value(double theta) const {
  const std::size_t i = locate(theta);
  const double h = theta_[i + 1] - theta_[i], t = (theta - theta_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * value_[i] + (t3 - 2 * t2 + t) * h * deriv_[i] +
         (-2 * t3 + 3 * t2) * value_[i + 1] + (t3 - t2) * h * deriv_[i + 1];
}

Complex OmegaTable::derivative(double theta) const {
  const std::size_t i = locate(theta);
  const double h = theta_[i + 1] - theta_[i], t = (theta - theta_[i]) / h;
  const double t2 = t * t;
  return (6 * t2 - 6 * t) / h * value_[i] + (3 * t2 - 4 * t + 1) * deriv_[i] +
         (-6 * t2 + 6 * t) / h * value_[i + 1] + (3 * t2 - 2 * t) * deriv_[i + 1];
}

OmegaTable build_omega(const CircleForm& v_L, const TraceFunction& g, const Channel& channel,
                       double theta_min, double theta_max, int nodes_per_tile,
                       double continuity_tolerance) {
  if (!(theta_max > theta_min)) throw DomainError("empty omega window");
  const auto& fi = channel.intervals();
  const int n = nodes_per_tile > 0 ? nodes_per_tile : 8 * v_L.order();
  const int k_lo = std::min(channel.locate_tile(theta_min).tile, 0);
  const int k_hi = std::max(channel.locate_tile(theta_max).tile, 0);
  const int tiles = k_hi - k_lo + 1;
  const bool has_g = g.theta_max > g.theta_min;
  const auto in_support = [&](double t) { return has_g && t > g.theta_min && t < g.theta_max; };

  // Node m of tile k at index (k - k_lo) * (n + 1) + m, m = 0..n.
  std::vector<double> th(std::size_t(tiles) * (n + 1));
  std::vector<Complex> val(th.size()), der(th.size());
  for (int m = 0; m <= n; ++m) {
    const double phi = kTwoPi * m / n;
    const Complex w0 = v_L.antiderivative(phi), v0 = v_L.evaluate(phi);
    const auto store = [&](int k, double theta, Complex w, Complex num, double d) {
      const std::size_t idx = std::size_t(k - k_lo) * (n + 1) + m;
      th[idx] = theta;
      val[idx] = w;
      der[idx] = num / d;
    };
    store(0, fi.theta0 + phi, w0, v0, 1.0);
    double theta = fi.theta0 + phi, d = 1.0;
    Complex w = w0, num = v0;
    for (int k = 1; k <= k_hi; ++k) {
      d *= channel.bounce_derivative(theta);
      theta = channel.bounce(theta);
      if (in_support(theta)) {
        w += g.g(theta);
        num += g.dg(theta) * d;
      }
      store(k, theta, w, num, d);
    }
    theta = fi.theta0 + phi, d = 1.0, w = w0, num = v0;
    for (int k = 1; k <= -k_lo; ++k) {
      if (in_support(theta)) {
        w -= g.g(theta);
        num -= g.dg(theta) * d;
      }
      theta = channel.bounce_inverse(theta);
      d /= channel.bounce_derivative(theta);
      store(-k, theta, w, num, d);
    }
  }

  OmegaTable table;
  table.first_tile_ = k_lo;
  table.last_tile_ = k_hi;
  for (int t = 0; t < tiles; ++t) {
    const std::size_t base = std::size_t(t) * (n + 1);
    const int last = (t + 1 == tiles) ? n : n - 1;
    for (int m = 0; m <= last; ++m) {
      table.theta_.push_back(th[base + m]);
      table.value_.push_back(val[base + m]);
      table.deriv_.push_back(der[base + m]);
    }
    if (t + 1 < tiles) {
      const double jump = std::abs(val[base + n] - val[base + n + 1]);
      table.max_jump_ = std::max(table.max_jump_, jump);
      if (jump > continuity_tolerance) {
        std::ostringstream os;
        os << "omega jumps by " << jump << " between tiles " << k_lo + t << " and "
           << k_lo + t + 1;
        throw ContinuityError(os.str());
      }
    }
  }
  return table;
}

Complex outgoing_field_value(const IncidentField& U0, const OmegaTable& omega, double x1,
                             double x2) {
  const double c = U0.c();
  const double tp = c * x1 + x2, tm = c * x1 - x2;
  Complex u = omega.value(tm) - omega.value(tp);
  if (x1 > U0.x1_min() && x1 < U0.x1_max()) u += U0(x1, x2);
  if (tm > U0.trace_min() && tm < U0.trace_max()) u -= U0.trace(tm);
  return u;
}

WaveField reconstruct_field(const IncidentField& U0, const OmegaTable& omega,
                            const BoundaryGrid& grid, int threads) {
  WaveField field(grid, U0.lambda());
  parallel_for(grid.n1() + 1, threads, [&](int i) {
    for (int j = 0; j <= grid.n2(); ++j)
      field.at(i, j) = outgoing_field_value(U0, omega, grid.x1(i), grid.x2(i, j));
  });
  return field;
}

Eigen::VectorXcd neumann_data(const WaveField& field) {
  return 0.5 * surface_normal_derivative(field.grid, field.values);
}

Complex neumann_value(const IncidentField& U0, const OmegaTable& omega, double theta) {
  Complex v = -omega.derivative(theta);
  const double x1 = theta / U0.c();
  if (x1 > U0.x1_min() && x1 < U0.x1_max()) v += 0.5 * U0.dx2(x1, 0.0);
  if (theta > U0.trace_min() && theta < U0.trace_max()) v += 0.5 * U0.trace_derivative(theta);
  return v;
}

CircleForm neumann_form(const WaveField& field, int K) {
  const BoundaryGrid& g = field.grid;
  const double c = characteristic_slope(field.lambda);
  if (std::abs(c * (g.x1_max() - g.x1_min()) - kTwoPi) > 1e-9)
    throw DomainError("neumann_form needs a grid spanning one period 2 pi / c");
  const Eigen::VectorXcd v = neumann_data(field);
  const SampledForm s = from_samples(std::span<const Complex>(v.data(), g.n1()), K);
  return s.form;
}

BoundaryGrid fundamental_grid(const Channel& channel, double theta_start, int n1, int n2) {
  const double c = channel.c();
  return BoundaryGrid(channel.topography(), theta_start / c, (theta_start + kTwoPi) / c, n1, n2);
}

OutgoingResolvent::OutgoingResolvent(Channel channel, StationaryOptions options)
    : channel_(std::move(channel)), options_(options) {
  ScatteringOptions so;
  so.K = options_.K;
  so.cond_cap = options_.cond_cap;
  assembly_ = build_scattering(channel_, so);
}

OutgoingSolution OutgoingResolvent::solve(const SourceTerm& f, double x1_min,
                                          double x1_max) const {
  check_source_support(f, channel_.topography());
  const auto& fi = channel_.intervals();
  const double c = channel_.c();
  OutgoingSolution sol{IncidentField(f, channel_.params(), options_.quad_order), {}, {}, {}, {},
                       assembly_.warnings};
  const TraceFunction trace = sol.U0.trace_function();
  const TransportData td = transport_data(trace, channel_, options_.K, options_.mean_tolerance);
  sol.transport_g = td.form;
  sol.diagnostics.mean_defect = td.mean_defect;
  sol.v = solve_outgoing_data(td.form, assembly_);

  const double depth = channel_.topography().max_depth();
  const double t_lo = std::min(c * x1_min - depth, fi.theta0) - 0.5;
  const double t_hi = std::max(c * x1_max + depth, fi.theta_R0 + kTwoPi) + 0.5;
  sol.omega = build_omega(sol.v.v_L, trace, channel_, t_lo, t_hi, 0,
                          options_.continuity_tolerance);
  sol.diagnostics.omega_jump = sol.omega.max_jump();

  const CircleForm res = sol.v.v_L - assembly_.B.apply(sol.v.v_R) - sol.transport_g;
  sol.diagnostics.transport_residual =
      sobolev_norm(res.band_limited(std::max(1, options_.K / 4)), 0.0);
  sol.diagnostics.transport_residual_full = sobolev_norm(res, 0.0);
  sol.diagnostics.outgoing_defect_L = sobolev_norm(project(sol.v.v_L, Sign::plus), 0.0);
  sol.diagnostics.outgoing_defect_R = sobolev_norm(project(sol.v.v_R, Sign::minus), 0.0);
  sol.diagnostics.quadrature_defect = trace_refinement_defect(sol.U0);
  if (sol.diagnostics.quadrature_defect > options_.quad_tolerance) {
    std::ostringstream os;
    os << "doubling the quadrature order changes g by " << sol.diagnostics.quadrature_defect;
    sol.warnings.push_back({"QuadratureWarning", os.str()});
  }
  if (td.discarded_fraction > 1e-12) {
    std::ostringstream os;
    os << "transport data leaves energy fraction " << td.discarded_fraction << " above K";
    sol.warnings.push_back({"AliasWarning", os.str()});
  }
  return sol;
}

}  // namespace subwave
