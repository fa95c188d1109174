#include "subwave/circle.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace subwave {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_order(const CircleForm& a, const CircleForm& b) {
  if (a.order() != b.order())
    throw DomainError("circle forms of different truncation order");
}

// Fourier coefficients (1/n) sum_m x_m e^{-ik 2pi m/n}, indexed k mod n.
std::vector<Complex> dft(const std::vector<Complex>& x) {
  Eigen::FFT<double> fft;
  std::vector<Complex> out;
  fft.fwd(out, x);
  const double inv = 1.0 / double(x.size());
  for (auto& v : out) v *= inv;
  return out;
}

Eigen::MatrixXcd pullback_entries(const CircleMap& map, int K, int n) {
  std::vector<double> phi(n), dphi(n);
  for (int m = 0; m < n; ++m) {
    const CirclePoint p = map(kTwoPi * m / n);
    phi[m] = p.angle;
    dphi[m] = p.derivative;
  }
  Eigen::MatrixXcd B(2 * K, 2 * K);
  std::vector<Complex> col(n);
  for (int ci = 0; ci < 2 * K; ++ci) {
    const int k = CircleForm::mode(ci, K);
    for (int m = 0; m < n; ++m) col[m] = std::polar(dphi[m], k * phi[m]);
    const auto hat = dft(col);
    for (int ri = 0; ri < 2 * K; ++ri) {
      const int j = CircleForm::mode(ri, K);
      B(ri, ci) = hat[(j % n + n) % n];
    }
  }
  return B;
}

}  // namespace

CircleForm::CircleForm(int K) : K_(K), coeffs_(Eigen::VectorXcd::Zero(2 * K)) {
  if (K < 1) throw DomainError("circle form order must be positive");
}

CircleForm::CircleForm(int K, Eigen::VectorXcd coeffs)
    : K_(K), coeffs_(std::move(coeffs)) {
  if (K < 1) throw DomainError("circle form order must be positive");
  if (coeffs_.size() != 2 * K)
    throw DomainError("circle form coefficient vector has wrong length");
}

int CircleForm::index(int k, int K) {
  if (k == 0 || k < -K || k > K) throw DomainError("Fourier mode out of range");
  return k < 0 ? k + K : k + K - 1;
}

int CircleForm::mode(int index, int K) { return index < K ? index - K : index - K + 1; }

Complex CircleForm::coeff(int k) const {
  if (k == 0 || std::abs(k) > K_) return 0.0;
  return coeffs_[index(k, K_)];
}

void CircleForm::set_coeff(int k, Complex value) { coeffs_[index(k, K_)] = value; }

Complex CircleForm::evaluate(double theta) const {
  Complex sum = 0.0;
  for (int i = 0; i < 2 * K_; ++i) sum += coeffs_[i] * std::polar(1.0, mode(i, K_) * theta);
  return sum;
}

Complex CircleForm::antiderivative(double theta) const {
  Complex sum = 0.0;
  for (int i = 0; i < 2 * K_; ++i) {
    const int k = mode(i, K_);
    sum += coeffs_[i] * (std::polar(1.0, k * theta) - 1.0) / Complex(0.0, k);
  }
  return sum;
}

Eigen::VectorXcd CircleForm::samples(int n) const {
  if (n < 2 * K_ + 1) throw DomainError("too few samples for circle form");
  std::vector<Complex> spec(n, 0.0);
  for (int i = 0; i < 2 * K_; ++i) spec[(mode(i, K_) % n + n) % n] = coeffs_[i];
  Eigen::FFT<double> fft;
  std::vector<Complex> out;
  fft.inv(out, spec);
  Eigen::VectorXcd v(n);
  for (int m = 0; m < n; ++m) v[m] = out[m] * double(n);
  return v;
}

CircleForm CircleForm::resized(int K) const {
  CircleForm out(K);
  for (int k = 1; k <= std::min(K, K_); ++k) {
    out.set_coeff(k, coeff(k));
    out.set_coeff(-k, coeff(-k));
  }
  return out;
}

CircleForm CircleForm::band_limited(int band) const {
  CircleForm out = *this;
  for (int i = 0; i < 2 * K_; ++i)
    if (std::abs(mode(i, K_)) > band) out.coeffs_[i] = 0.0;
  return out;
}

CircleForm& CircleForm::operator+=(const CircleForm& other) {
  require_same_order(*this, other);
  coeffs_ += other.coeffs_;
  return *this;
}

CircleForm& CircleForm::operator-=(const CircleForm& other) {
  require_same_order(*this, other);
  coeffs_ -= other.coeffs_;
  return *this;
}

CircleForm& CircleForm::operator*=(Complex s) {
  coeffs_ *= s;
  return *this;
}

SampledForm from_samples(std::span<const Complex> values, int K) {
  const int n = int(values.size());
  if (n < 4 * K + 4) {
    std::ostringstream os;
    os << "from_samples needs at least " << 4 * K + 4 << " samples, got " << n;
    throw DomainError(os.str());
  }
  const auto hat = dft(std::vector<Complex>(values.begin(), values.end()));
  SampledForm out{CircleForm(K), std::abs(hat[0]), 0.0, {}};
  double kept = 0.0, total = 0.0;
  for (int i = 0; i < n; ++i) {
    const int k = i <= n / 2 ? i : i - n;
    const double e = std::norm(hat[i]);
    if (k == 0) continue;
    total += e;
    if (std::abs(k) <= K) {
      out.form.set_coeff(k, hat[i]);
      kept += e;
    }
  }
  out.discarded_fraction = total > 0.0 ? (total - kept) / total : 0.0;
  if (out.discarded_fraction > 1e-8) {
    std::ostringstream os;
    os << "discarded " << out.discarded_fraction << " of the energy above K = " << K;
    out.warnings.push_back({"AliasWarning", os.str()});
  }
  return out;
}

CircleForm project(const CircleForm& v, Sign sign) {
  CircleForm out = v;
  const int K = v.order();
  if (sign == Sign::plus)
    out.coeffs().head(K).setZero();
  else
    out.coeffs().tail(K).setZero();
  return out;
}

double sobolev_norm(const CircleForm& v, double s) {
  double sum = 0.0;
  for (int i = 0; i < 2 * v.order(); ++i) {
    const double k = std::abs(CircleForm::mode(i, v.order()));
    sum += std::pow(k, 2.0 * s) * std::norm(v.coeffs()[i]);
  }
  return std::sqrt(sum);
}

double quantum_flux(const CircleForm& v) {
  double sum = 0.0;
  for (int i = 0; i < 2 * v.order(); ++i)
    sum += CircleForm::mode(i, v.order()) * std::norm(v.coeffs()[i]);
  return kTwoPi * sum;
}

double primitive_flux(const CircleForm& v) {
  double sum = 0.0;
  for (int i = 0; i < 2 * v.order(); ++i)
    sum += std::norm(v.coeffs()[i]) / CircleForm::mode(i, v.order());
  return kTwoPi * sum;
}

CircleForm PullbackMatrix::apply(const CircleForm& v) const {
  if (v.order() != K) throw DomainError("pullback applied at wrong truncation order");
  return CircleForm(K, entries * v.coeffs());
}

PullbackMatrix assemble_pullback(const CircleMap& map, int K, int n_quad,
                                 bool check_quadrature) {
  if (K < 1) throw DomainError("pullback order must be positive");
  if (n_quad == 0) n_quad = 8 * K;
  if (n_quad < 8 * K) throw DomainError("pullback quadrature needs n_quad >= 8K");
  PullbackMatrix out;
  out.K = K;
  out.entries = pullback_entries(map, K, n_quad);
  if (!check_quadrature) return out;
  // Keep doubling while the doubled rule still moves entries; report the last
  // change observed.
  constexpr int kMaxDoublings = 4;
  for (int d = 0; d < kMaxDoublings; ++d) {
    n_quad *= 2;
    Eigen::MatrixXcd finer = pullback_entries(map, K, n_quad);
    out.quadrature_defect = (finer - out.entries).cwiseAbs().maxCoeff();
    out.entries = std::move(finer);
    if (out.quadrature_defect <= 1e-10) return out;
  }
  std::ostringstream os;
  os << "pullback quadrature still changes entries by " << out.quadrature_defect
     << " at n_quad = " << n_quad;
  out.warnings.push_back({"QuadratureWarning", os.str()});
  return out;
}

CircleMap invert_circle_map(CircleMap map, double tolerance) {
  const double shift = map(0.0).angle;
  return [map = std::move(map), shift, tolerance](double psi) {
    // map(phi) - phi is 2pi-periodic with oscillation below 2pi, so the
    // preimage lies within 2pi of psi - map(0).
    double lo = psi - shift - kTwoPi, hi = psi - shift + kTwoPi;
    while (map(lo).angle > psi) lo -= kTwoPi;
    while (map(hi).angle < psi) hi += kTwoPi;
    for (int it = 0; it < 200 && hi - lo > tolerance; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (map(mid).angle < psi) lo = mid; else hi = mid;
    }
    const double phi = 0.5 * (lo + hi);
    return CirclePoint{phi, 1.0 / map(phi).derivative};
  };
}

void write_form_csv(std::ostream& os, const CircleForm& v) {
  os << "k,re,im\n" << std::setprecision(17);
  for (int i = 0; i < 2 * v.order(); ++i)
    os << CircleForm::mode(i, v.order()) << ',' << v.coeffs()[i].real() << ','
       << v.coeffs()[i].imag() << '\n';
}

CircleForm read_form_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("k,re,im", 0) != 0)
    throw ConfigError("circle form CSV must start with header k,re,im");
  std::map<int, Complex> entries;
  int K = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int k;
    double re, im;
    char c1, c2;
    if (!(ls >> k >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',')
      throw ConfigError("malformed circle form CSV line: " + line);
    if (k == 0) throw ConfigError("circle form CSV must omit k = 0");
    entries[k] = Complex(re, im);
    K = std::max(K, std::abs(k));
  }
  if (K == 0) throw ConfigError("circle form CSV has no coefficients");
  CircleForm v(K);
  for (const auto& [k, value] : entries) v.set_coeff(k, value);
  return v;
}

}  // namespace subwave
