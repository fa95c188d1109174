#include "subwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace subwave {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGaussianFloor = 1e-18;

// Centered cubic B-spline and its first two derivatives, support (-2, 2).
double bspline(double t) {
  const double a = std::abs(t);
  if (a >= 2.0) return 0.0;
  if (a >= 1.0) {
    const double u = 2.0 - a;
    return u * u * u / 6.0;
  }
  return 2.0 / 3.0 - a * a + 0.5 * a * a * a;
}

double bspline_d1(double t) {
  const double a = std::abs(t);
  const double s = t < 0.0 ? -1.0 : 1.0;
  if (a >= 2.0) return 0.0;
  if (a >= 1.0) {
    const double u = 2.0 - a;
    return -s * 0.5 * u * u;
  }
  return s * (-2.0 * a + 1.5 * a * a);
}

double bspline_d2(double t) {
  const double a = std::abs(t);
  if (a >= 2.0) return 0.0;
  if (a >= 1.0) return 2.0 - a;
  return -2.0 + 3.0 * a;
}

// Solves the tridiagonal system (c[m-1] + 4 c[m] + c[m+1]) / 6 = h[m].
std::vector<double> interpolating_coeffs(const std::vector<double>& h) {
  const std::size_t n = h.size();
  std::vector<double> diag(n, 4.0 / 6.0), rhs = h;
  const double off = 1.0 / 6.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double w = off / diag[i - 1];
    diag[i] -= w * off;
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> c(n);
  c[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) c[i] = (rhs[i] - off * c[i + 1]) / diag[i];
  return c;
}

// Safeguarded Newton on an increasing function F with F(lo) <= 0 <= F(hi).
template <class F, class DF>
double increasing_root(F f, DF df, double lo, double hi, const char* what) {
  // The analytic bracket can be tight to rounding when the root sits at an
  // endpoint; widen it slightly.
  const double pad = 1e-9 * std::max(1.0, std::abs(lo) + std::abs(hi));
  lo -= pad;
  hi += pad;
  double flo = f(lo), fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0) {
    std::ostringstream os;
    os << what << ": root not bracketed in [" << lo << ", " << hi << "]";
    throw ConvergenceError(os.str());
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fs = f(s);
    if (fs == 0.0) return s;
    if (fs < 0.0) lo = s; else hi = s;
    const double d = df(s);
    double next = d > 0.0 ? s - fs / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double tol = 1e-13 * std::max(1.0, std::abs(s));
    if (std::abs(next - s) <= tol || hi - lo <= tol) return next;
    s = next;
  }
  std::ostringstream os;
  os << what << ": no convergence after 200 iterations";
  throw ConvergenceError(os.str());
}

}  // namespace

Topography Topography::flat() {
  Topography t;
  t.finalize_extent();
  return t;
}

Topography Topography::gaussian_bump(double amplitude, double width,
                                     double center) {
  if (!(width > 0.0)) throw DomainError("gaussian bump width must be positive");
  if (!(amplitude < kFlatDepth))
    throw DomainError("gaussian bump amplitude must stay below the flat depth");
  Topography t;
  t.kind_ = TopographyKind::gaussian_bump;
  t.amplitude_ = amplitude;
  t.width_ = width;
  t.center_ = center;
  if (std::abs(amplitude) > kGaussianFloor) {
    t.cut_ = std::sqrt(std::log(std::abs(amplitude) / kGaussianFloor));
    t.support_radius_ = std::abs(center) + t.cut_ * width;
  }
  t.finalize_extent();
  return t;
}

Topography Topography::spline(std::vector<double> knots,
                              std::vector<double> values) {
  if (knots.size() < 2 || knots.size() != values.size())
    throw DomainError("spline topography needs matching knot/value arrays");
  const double dx = (knots.back() - knots.front()) / double(knots.size() - 1);
  if (!(dx > 0.0)) throw DomainError("spline knots must be increasing");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const double expect = knots.front() + dx * double(i);
    if (std::abs(knots[i] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      throw DomainError("spline knots must be uniformly spaced");
    if (!(values[i] < 0.0)) throw DomainError("spline depths must be negative");
  }
  Topography t;
  t.kind_ = TopographyKind::spline;
  t.knots_ = std::move(knots);
  t.values_ = std::move(values);
  t.knot_spacing_ = dx;
  std::vector<double> h(t.values_.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = t.values_[i] + kFlatDepth;
  t.bspline_coeffs_ = interpolating_coeffs(h);
  t.support_radius_ = std::max(std::abs(t.knots_.front() - 2.0 * dx),
                               std::abs(t.knots_.back() + 2.0 * dx));
  t.finalize_extent();
  return t;
}

void Topography::finalize_extent() {
  max_depth_ = kFlatDepth;
  min_depth_ = kFlatDepth;
  if (kind_ == TopographyKind::flat) return;
  const int n = 20001;
  const double R = support_radius_;
  for (int i = 0; i < n; ++i) {
    const double d = -depth(-R + 2.0 * R * i / (n - 1));
    max_depth_ = std::max(max_depth_, d);
    min_depth_ = std::min(min_depth_, d);
  }
  if (kind_ == TopographyKind::gaussian_bump) {
    // Extremum sits exactly at the center.
    max_depth_ = std::max(kFlatDepth, kFlatDepth - amplitude_);
    min_depth_ = std::min(kFlatDepth, kFlatDepth - amplitude_);
  } else {
    // Sampling can miss the spline extremum by O(h^2 G''); pad generously.
    const double pad = 1e-3 * (max_depth_ - min_depth_) + 1e-9;
    max_depth_ += pad;
    min_depth_ -= pad;
  }
  if (!(min_depth_ > 0.0))
    throw DomainError("topography touches the surface (G must stay negative)");
}

double Topography::depth(double x1) const {
  switch (kind_) {
    case TopographyKind::flat:
      return -kFlatDepth;
    case TopographyKind::gaussian_bump: {
      const double u = (x1 - center_) / width_;
      if (std::abs(u) >= cut_) return -kFlatDepth;
      return -kFlatDepth + amplitude_ * std::exp(-u * u);
    }
    case TopographyKind::spline: {
      if (std::abs(x1) >= support_radius_) return -kFlatDepth;
      double h = 0.0;
      const double t = (x1 - knots_.front()) / knot_spacing_;
      const long m0 = std::max(0L, long(std::floor(t)) - 1);
      const long m1 = std::min(long(knots_.size()) - 1, long(std::floor(t)) + 2);
      for (long m = m0; m <= m1; ++m) h += bspline_coeffs_[m] * bspline(t - double(m));
      return -kFlatDepth + h;
    }
  }
  return -kFlatDepth;
}

double Topography::slope(double x1) const {
  switch (kind_) {
    case TopographyKind::flat:
      return 0.0;
    case TopographyKind::gaussian_bump: {
      const double u = (x1 - center_) / width_;
      if (std::abs(u) >= cut_) return 0.0;
      return -2.0 * amplitude_ * u * std::exp(-u * u) / width_;
    }
    case TopographyKind::spline: {
      if (std::abs(x1) >= support_radius_) return 0.0;
      double h = 0.0;
      const double t = (x1 - knots_.front()) / knot_spacing_;
      const long m0 = std::max(0L, long(std::floor(t)) - 1);
      const long m1 = std::min(long(knots_.size()) - 1, long(std::floor(t)) + 2);
      for (long m = m0; m <= m1; ++m) h += bspline_coeffs_[m] * bspline_d1(t - double(m));
      return h / knot_spacing_;
    }
  }
  return 0.0;
}

double Topography::curvature(double x1) const {
  switch (kind_) {
    case TopographyKind::flat:
      return 0.0;
    case TopographyKind::gaussian_bump: {
      const double u = (x1 - center_) / width_;
      if (std::abs(u) >= cut_) return 0.0;
      return amplitude_ * (4.0 * u * u - 2.0) * std::exp(-u * u) / (width_ * width_);
    }
    case TopographyKind::spline: {
      if (std::abs(x1) >= support_radius_) return 0.0;
      double h = 0.0;
      const double t = (x1 - knots_.front()) / knot_spacing_;
      const long m0 = std::max(0L, long(std::floor(t)) - 1);
      const long m1 = std::min(long(knots_.size()) - 1, long(std::floor(t)) + 2);
      for (long m = m0; m <= m1; ++m) h += bspline_coeffs_[m] * bspline_d2(t - double(m));
      return h / (knot_spacing_ * knot_spacing_);
    }
  }
  return 0.0;
}

std::string Topography::describe() const {
  std::ostringstream os;
  os << std::setprecision(17);
  switch (kind_) {
    case TopographyKind::flat:
      os << "flat";
      break;
    case TopographyKind::gaussian_bump:
      os << "gaussian_bump amplitude=" << amplitude_ << " width=" << width_
         << " center=" << center_;
      break;
    case TopographyKind::spline:
      os << "spline knots=";
      for (std::size_t i = 0; i < knots_.size(); ++i) os << (i ? "," : "") << knots_[i];
      os << " values=";
      for (std::size_t i = 0; i < values_.size(); ++i) os << (i ? "," : "") << values_[i];
      break;
  }
  return os.str();
}

double characteristic_slope(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    std::ostringstream os;
    os << "frequency lambda = " << lambda << " outside (0, 1)";
    throw DomainError(os.str());
  }
  return std::sqrt(1.0 - lambda * lambda) / lambda;
}

ChannelParams check_subcritical(const Topography& topo, double lambda) {
  ChannelParams p;
  p.lambda = lambda;
  p.c = characteristic_slope(lambda);
  const double R = topo.support_radius();
  double best = 0.0;
  if (topo.kind() != TopographyKind::flat && R > 0.0) {
    const int n = 40001;
    const double h = 2.0 * R / (n - 1);
    std::vector<std::pair<double, double>> samples;
    samples.reserve(n);
    for (int i = 0; i < n; ++i) {
      const double x = -R + h * i;
      samples.emplace_back(std::abs(topo.slope(x)), x);
    }
    // Refine around the largest few local maxima by golden-section search.
    std::vector<double> peaks;
    for (int i = 1; i + 1 < n; ++i)
      if (samples[i].first >= samples[i - 1].first &&
          samples[i].first >= samples[i + 1].first && samples[i].first > 0.0)
        peaks.push_back(samples[i].second);
    std::sort(peaks.begin(), peaks.end(), [&](double a, double b) {
      return std::abs(topo.slope(a)) > std::abs(topo.slope(b));
    });
    if (peaks.size() > 8) peaks.resize(8);
    for (const auto& s : samples) best = std::max(best, s.first);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (double x0 : peaks) {
      double a = x0 - h, b = x0 + h;
      double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
      double f1 = std::abs(topo.slope(c1)), f2 = std::abs(topo.slope(c2));
      for (int it = 0; it < 80 && b - a > 1e-15 * std::max(1.0, std::abs(x0)); ++it) {
        if (f1 > f2) {
          b = c2; c2 = c1; f2 = f1;
          c1 = b - gr * (b - a); f1 = std::abs(topo.slope(c1));
        } else {
          a = c1; c1 = c2; f1 = f2;
          c2 = a + gr * (b - a); f2 = std::abs(topo.slope(c2));
        }
      }
      best = std::max({best, f1, f2});
    }
  }
  p.max_slope = best;
  p.subcritical_margin = 1.0 - best / p.c;
  if (best >= p.c) throw SupercriticalError(best, p.c);
  p.M = R + 3.0 * kPi / p.c + 0.5;
  return p;
}

double gamma_plus(const ChannelParams& params, const Topography& topo,
                  double x1) {
  const double c = params.c;
  const double flat = x1 + kFlatDepth / c;
  if (std::abs(flat) >= topo.support_radius()) return flat;
  return increasing_root([&](double s) { return s + topo.depth(s) / c - x1; },
                         [&](double s) { return 1.0 + topo.slope(s) / c; },
                         x1 + topo.min_depth() / c, x1 + topo.max_depth() / c,
                         "gamma_plus");
}

double gamma_minus(const ChannelParams& params, const Topography& topo,
                   double x1) {
  const double c = params.c;
  const double flat = x1 - kFlatDepth / c;
  if (std::abs(flat) >= topo.support_radius()) return flat;
  return increasing_root([&](double s) { return s - topo.depth(s) / c - x1; },
                         [&](double s) { return 1.0 - topo.slope(s) / c; },
                         x1 - topo.max_depth() / c, x1 - topo.min_depth() / c,
                         "gamma_minus");
}

double billiard(const ChannelParams& params, const Topography& topo,
                double x1) {
  const double s = gamma_plus(params, topo, x1);
  return x1 - 2.0 * topo.depth(s) / params.c;
}

double billiard_derivative(const ChannelParams& params,
                           const Topography& topo, double x1) {
  const double gp = topo.slope(gamma_plus(params, topo, x1));
  return (params.c - gp) / (params.c + gp);
}

double billiard_inverse(const ChannelParams& params, const Topography& topo,
                        double x1) {
  const double s = gamma_minus(params, topo, x1);
  return x1 + 2.0 * topo.depth(s) / params.c;
}

FundamentalIntervals find_fundamental_intervals(const ChannelParams& params,
                                                const Topography& topo,
                                                int max_bounces) {
  const double c = params.c;
  const double cM = c * params.M;
  const auto bounce = [&](double theta) { return c * billiard(params, topo, theta / c); };
  FundamentalIntervals fi;
  fi.theta0 = -cM - kTwoPi;
  const double limit = cM + 1e-12 * std::max(1.0, cM);
  double theta = fi.theta0;
  double right = fi.theta0 + kTwoPi;
  int n = 0;
  while (theta <= limit) {
    if (n >= max_bounces) {
      std::ostringstream os;
      os << "fundamental interval search exceeded " << max_bounces << " bounces";
      throw IterationLimitError(os.str());
    }
    theta = bounce(theta);
    right = bounce(right);
    ++n;
  }
  fi.N = n;
  fi.theta_R0 = theta;
  if (std::abs(right - theta - kTwoPi) > 1e-10) {
    std::ostringstream os;
    os << std::setprecision(12)
       << "b^N does not map J_L onto a period: width " << (right - theta);
    throw ConvergenceError(os.str());
  }
  return fi;
}

CirclePoint circle_map(const FundamentalIntervals& fi,
                       const ChannelParams& params, const Topography& topo,
                       double phi) {
  const double c = params.c;
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  double theta = fi.theta0 + r;
  double deriv = 1.0;
  for (int k = 0; k < fi.N; ++k) {
    deriv *= billiard_derivative(params, topo, theta / c);
    theta = c * billiard(params, topo, theta / c);
  }
  double a = std::fmod(theta - fi.theta_R0, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return {a, deriv};
}

Channel::Channel(Topography topo, double lambda)
    : topo_(std::move(topo)),
      params_(check_subcritical(topo_, lambda)),
      fi_(find_fundamental_intervals(params_, topo_)) {}

double Channel::bounce(double theta) const {
  return params_.c * billiard(params_, topo_, theta / params_.c);
}

double Channel::bounce_derivative(double theta) const {
  return billiard_derivative(params_, topo_, theta / params_.c);
}

double Channel::bounce_inverse(double theta) const {
  return params_.c * billiard_inverse(params_, topo_, theta / params_.c);
}

double Channel::iterate(double theta, int k) const {
  for (; k > 0; --k) theta = bounce(theta);
  for (; k < 0; ++k) theta = bounce_inverse(theta);
  return theta;
}

double Channel::iterate_derivative(double theta, int k) const {
  double d = 1.0;
  for (; k > 0; --k) {
    d *= bounce_derivative(theta);
    theta = bounce(theta);
  }
  for (; k < 0; ++k) {
    theta = bounce_inverse(theta);
    d /= bounce_derivative(theta);
  }
  return d;
}

Channel::TileLocation Channel::locate_tile(double theta) const {
  const double left_end = fi_.theta0 + kTwoPi;
  if (theta < left_end) {
    const double k = std::floor((theta - fi_.theta0) / kTwoPi);
    double base = theta - kTwoPi * k;
    if (base >= left_end) base = fi_.theta0;
    return {int(k), base};
  }
  int tile = 0;
  if (theta >= fi_.theta_R0 + kTwoPi) {
    const double m = std::floor((theta - fi_.theta_R0) / kTwoPi);
    theta -= kTwoPi * m;
    tile = int(m) + fi_.N;
    theta = iterate(theta, -fi_.N);
  }
  while (theta >= left_end) {
    theta = bounce_inverse(theta);
    ++tile;
  }
  if (theta < fi_.theta0) theta = fi_.theta0;
  return {tile, theta};
}

CirclePoint Channel::circle_lift(double phi) const {
  const double n = std::floor(phi / kTwoPi);
  const double r = phi - kTwoPi * n;
  double theta = fi_.theta0 + r;
  double deriv = 1.0;
  for (int k = 0; k < fi_.N; ++k) {
    deriv *= bounce_derivative(theta);
    theta = bounce(theta);
  }
  return {theta - fi_.theta_R0 + kTwoPi * n, deriv};
}

CircleMap Channel::circle_map() const {
  return [self = *this](double phi) { return self.circle_lift(phi); };
}

CircleMap Channel::inverse_circle_map() const {
  return [self = *this](double psi) {
    const auto& fi = self.fi_;
    const double n = std::floor(psi / kTwoPi);
    const double r = psi - kTwoPi * n;
    double theta = fi.theta_R0 + r;
    double deriv = 1.0;
    for (int k = 0; k < fi.N; ++k) {
      theta = self.bounce_inverse(theta);
      deriv /= self.bounce_derivative(theta);
    }
    return CirclePoint{theta - fi.theta0 + kTwoPi * n, deriv};
  };
}

}  // namespace subwave
