#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <iosfwd>
#include <span>

#include "subwave/errors.hpp"

namespace subwave {

using Complex = std::complex<double>;

/// Value and derivative of a circle map (or its lift) at one point.
struct CirclePoint {
  double angle = 0.0;
  double derivative = 1.0;
};

/// Lift of an orientation-preserving circle diffeomorphism:
/// map(phi + 2pi) = map(phi) + 2pi, derivative > 0.
using CircleMap = std::function<CirclePoint(double)>;

/// Mean-zero 1-form v(theta) d theta on R / 2pi Z, stored by its Fourier
/// coefficients v(k), 0 < |k| <= K, with v(theta) = sum_k v(k) e^{ik theta}.
///
/// Coefficient layout: k = -K..-1 occupy indices 0..K-1, k = 1..K occupy
/// K..2K-1, so the negative- and positive-frequency halves are contiguous.
class CircleForm {
 public:
  CircleForm() = default;
  explicit CircleForm(int K);
  CircleForm(int K, Eigen::VectorXcd coeffs);

  int order() const noexcept { return K_; }
  Complex coeff(int k) const;
  void set_coeff(int k, Complex value);
  const Eigen::VectorXcd& coeffs() const noexcept { return coeffs_; }
  Eigen::VectorXcd& coeffs() noexcept { return coeffs_; }

  static int index(int k, int K);
  static int mode(int index, int K);

  /// Pointwise value of the density at theta.
  Complex evaluate(double theta) const;
  /// integral_0^theta v; periodic because the mean vanishes.
  Complex antiderivative(double theta) const;
  /// Density samples at n uniform angles 2 pi m / n.
  Eigen::VectorXcd samples(int n) const;

  /// Copy truncated or zero-padded to order K.
  CircleForm resized(int K) const;
  /// Zero every coefficient with |k| > band.
  CircleForm band_limited(int band) const;

  CircleForm& operator+=(const CircleForm& other);
  CircleForm& operator-=(const CircleForm& other);
  CircleForm& operator*=(Complex s);
  friend CircleForm operator+(CircleForm a, const CircleForm& b) { return a += b; }
  friend CircleForm operator-(CircleForm a, const CircleForm& b) { return a -= b; }
  friend CircleForm operator*(Complex s, CircleForm a) { return a *= s; }

 private:
  int K_ = 0;
  Eigen::VectorXcd coeffs_;
};

struct SampledForm {
  CircleForm form;
  double mean_defect = 0.0;        // |v(0)| removed to enforce mean zero
  double discarded_fraction = 0.0; // energy above K relative to total
  Warnings warnings;
};

/// DFT of n >= 4K + 4 uniform samples; modes above K are discarded
/// (AliasWarning above 1e-8 of the energy) and the mean is removed.
SampledForm from_samples(std::span<const Complex> values, int K);

enum class Sign { plus, minus };

CircleForm project(const CircleForm& v, Sign sign);

/// (sum_{k != 0} |k|^{2s} |v(k)|^2)^{1/2}.
double sobolev_norm(const CircleForm& v, double s);

/// F(v) = (1/i) int conj(v) dv = 2 pi sum_k k |v(k)|^2.
double quantum_flux(const CircleForm& v);

/// Flux of the primitive V (dV = v): (1/i) int conj(V) dV
/// = 2 pi sum_k |v(k)|^2 / k. This is the quadratic form preserved by
/// pullbacks of 1-forms; quantum_flux is preserved by pullbacks of functions.
double primitive_flux(const CircleForm& v);

/// Matrix of the pullback phi^* v = v(phi(theta)) phi'(theta) d theta on
/// mean-zero forms, in the CircleForm layout.
struct PullbackMatrix {
  int K = 0;
  Eigen::MatrixXcd entries;
  double quadrature_defect = 0.0;  // max entry change when n_quad doubles
  Warnings warnings;

  CircleForm apply(const CircleForm& v) const;
};

/// B_jk = (1/2pi) int e^{-ij theta} e^{ik phi(theta)} phi'(theta) d theta by
/// the trapezoidal rule on n_quad nodes (n_quad >= 8K; 0 selects 8K).
PullbackMatrix assemble_pullback(const CircleMap& map, int K, int n_quad = 0,
                                 bool check_quadrature = true);

/// Inverse of a circle-map lift, evaluated node by node by bisection.
CircleMap invert_circle_map(CircleMap map, double tolerance = 1e-13);

/// CSV with header "k,re,im", k ascending, k = 0 omitted.
void write_form_csv(std::ostream& os, const CircleForm& v);
CircleForm read_form_csv(std::istream& is);

}  // namespace subwave
