#include "subwave/source.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "subwave/errors.hpp"

namespace subwave {

namespace {

double envelope(double t) {
  const double s = 1.0 - t * t;
  if (s <= 0.0) return 0.0;
  const double s2 = s * s, s4 = s2 * s2;
  return s4 * s4;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

SourceTerm SourceTerm::custom(std::function<Complex(double, double)> f, SourceBox box,
                              int smoothness) {
  if (!(box.x1_max > box.x1_min) || !(box.x2_max > box.x2_min))
    throw DomainError("source box must have positive extent");
  const double d1 = 1e-6 * (box.x1_max - box.x1_min), d2 = 1e-6 * (box.x2_max - box.x2_min);
  for (int m = 0; m <= 64; ++m) {
    const double a = box.x1_min + (box.x1_max - box.x1_min) * m / 64.0;
    const double b = box.x2_min + (box.x2_max - box.x2_min) * m / 64.0;
    for (auto [x1, x2] : {std::pair{a, box.x2_min - d2}, std::pair{a, box.x2_max + d2},
                          std::pair{box.x1_min - d1, b}, std::pair{box.x1_max + d1, b}})
      if (std::abs(f(x1, x2)) > 1e-12)
        throw DomainError("source does not vanish outside its declared box");
  }
  SourceTerm s;
  s.pieces_.push_back({std::move(f), box});
  s.smoothness_ = smoothness;
  s.description_ = "custom";
  return s;
}

SourceTerm SourceTerm::mode(int k, double radius, Complex amplitude) {
  if (k < 1 || !(radius > 0.0)) throw DomainError("mode source needs k >= 1 and radius > 0");
  SourceTerm s;
  s.pieces_.push_back({[k, radius, amplitude](double x1, double x2) {
                         return amplitude * envelope(x1 / radius) * std::sin(k * x2);
                       },
                       {-radius, radius, -std::numbers::pi, 0.0}});
  s.smoothness_ = 7;
  s.description_ = "mode k=" + std::to_string(k) + " r=" + fmt(radius) + " a=" +
                   fmt(amplitude.real()) + "," + fmt(amplitude.imag());
  return s;
}

SourceTerm SourceTerm::bump(double p, double q, double r1, double r2, Complex amplitude) {
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw DomainError("bump radii must be positive");
  SourceTerm s;
  s.pieces_.push_back({[=](double x1, double x2) {
                         return amplitude * envelope((x1 - p) / r1) * envelope((x2 - q) / r2);
                       },
                       {p - r1, p + r1, q - r2, q + r2}});
  s.smoothness_ = 7;
  s.description_ = "bump p=" + fmt(p) + " q=" + fmt(q) + " r1=" + fmt(r1) + " r2=" + fmt(r2) +
                   " a=" + fmt(amplitude.real()) + "," + fmt(amplitude.imag());
  return s;
}

SourceTerm SourceTerm::random(const Topography& topo, int count, std::uint64_t seed,
                              double x1_reach) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n;
  const double floor = -topo.min_depth();  // highest point of the bottom
  SourceTerm s;
  for (int i = 0; i < count; ++i) {
    const double r1 = 0.5 + 0.5 * u(rng);
    const double p = (x1_reach - r1) * (2.0 * u(rng) - 1.0);
    const double top = -0.2, bottom = floor + 0.2;
    const double r2 = std::min(0.6, 0.25 * (top - bottom)) * (0.7 + 0.3 * u(rng));
    const double q = bottom + r2 + (top - bottom - 2.0 * r2) * u(rng);
    const double re = n(rng), im = n(rng);
    s += bump(p, q, r1, r2, Complex(re, im));
  }
  s.description_ = "random count=" + std::to_string(count) + " seed=" + std::to_string(seed);
  return s;
}

Complex SourceTerm::operator()(double x1, double x2) const {
  Complex sum = 0.0;
  for (const auto& p : pieces_)
    if (p.box.contains(x1, x2)) sum += p.f(x1, x2);
  return sum;
}

SourceBox SourceTerm::support() const {
  if (pieces_.empty()) return {};
  SourceBox b = pieces_.front().box;
  for (const auto& p : pieces_) {
    b.x1_min = std::min(b.x1_min, p.box.x1_min);
    b.x1_max = std::max(b.x1_max, p.box.x1_max);
    b.x2_min = std::min(b.x2_min, p.box.x2_min);
    b.x2_max = std::max(b.x2_max, p.box.x2_max);
  }
  return b;
}

SourceTerm& SourceTerm::operator+=(const SourceTerm& other) {
  if (other.empty()) return *this;
  if (empty()) return *this = other;
  pieces_.insert(pieces_.end(), other.pieces_.begin(), other.pieces_.end());
  smoothness_ = std::min(smoothness_, other.smoothness_);
  description_ += " + " + other.description_;
  return *this;
}

SourceTerm operator*(Complex s, const SourceTerm& a) {
  SourceTerm out = a;
  for (auto& p : out.pieces_)
    p.f = [f = p.f, s](double x1, double x2) { return s * f(x1, x2); };
  out.description_ = "(" + fmt(s.real()) + "," + fmt(s.imag()) + ") * (" + a.description_ + ")";
  return out;
}

void check_source_support(const SourceTerm& f, const Topography& topo) {
  const double reach = topo.support_radius() + 1.0;
  for (const auto& p : f.pieces()) {
    const SourceBox& b = p.box;
    if (b.x2_max > 0.0 || std::max(std::abs(b.x1_min), std::abs(b.x1_max)) > reach + 1e-12) {
      std::ostringstream os;
      os << "source box [" << b.x1_min << ", " << b.x1_max << "] x [" << b.x2_min << ", "
         << b.x2_max << "] exceeds |x1| <= R0 + 1 = " << reach << " or x2 <= 0";
      throw SupportError(os.str());
    }
    for (int m = 0; m <= 400; ++m) {
      const double x1 = b.x1_min + (b.x1_max - b.x1_min) * m / 400.0;
      if (b.x2_min < topo.depth(x1) - 1e-12) {
        std::ostringstream os;
        os << "source box dips below the bottom at x1 = " << x1;
        throw SupportError(os.str());
      }
    }
  }
}

}  // namespace subwave
