#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "subwave/circle.hpp"
#include "subwave/geometry.hpp"

namespace subwave {

struct ScatteringOptions {
  int K = 256;
  int n_quad = 0;             // 0 selects 8K
  double cond_cap = 1e8;
  double margin_warning = 0.05;
};

/// Finite sections of b^*, b^{-*}, the block operator T and the scattering
/// matrix S, all in the CircleForm coefficient layout (negative modes first).
struct ScatteringAssembly {
  int K = 0;
  PullbackMatrix B;     // b^*
  PullbackMatrix Binv;  // b^{-*}
  Eigen::MatrixXcd T;
  Eigen::MatrixXcd T_inverse;  // dense LU with partial pivoting
  Eigen::MatrixXcd S;
  double cond_T = 0.0;
  double min_singular_T = 0.0;
  double offdiag_norm = 0.0;  // spectral norm of T - Id
  Warnings warnings;

  bool has_scattering_matrix() const noexcept { return S.size() > 0; }
};

/// T = [[Id, -Pi^- B Pi^+], [-Pi^+ Binv Pi^-, Id]] on (k<0) (+) (k>0).
Eigen::MatrixXcd assemble_T(const PullbackMatrix& B, const PullbackMatrix& Binv);

/// Assembles B and Binv from a circle map and its inverse, then T and its
/// conditioning diagnostics.
ScatteringAssembly assemble_scattering(const CircleMap& map,
                                       const CircleMap& inverse,
                                       const ScatteringOptions& options = {});
ScatteringAssembly assemble_scattering(const Channel& channel,
                                       const ScatteringOptions& options = {});

/// S = T^{-1} diag(Pi^- B Pi^-, Pi^+ Binv Pi^+), mapping incoming data g^i to
/// outgoing data g^o. Stores S in the assembly and returns it. Throws
/// IllConditionedError when cond_T exceeds the cap.
const Eigen::MatrixXcd& scattering_matrix(ScatteringAssembly& assembly,
                                          double cond_cap = 1e8);

/// Convenience: assemble and compute S.
ScatteringAssembly build_scattering(const Channel& channel,
                                    const ScatteringOptions& options = {});

struct SmoothingRemainder {
  Eigen::MatrixXcd R;
  int band = 0;        // inner band |j|, |k| <= band used for the fits
  double C2 = 0.0;     // max |R_jk| (1 + |j| + |k|)^N over the band
  double C4 = 0.0;
  double C6 = 0.0;
  double max_abs = 0.0;
};

/// R = S - Pi^- B Pi^- - Pi^+ Binv Pi^+ with decay constants over |k| <= K/4.
SmoothingRemainder smoothing_remainder(const ScatteringAssembly& assembly);

struct BoundaryPair {
  CircleForm v_L;
  CircleForm v_R;
};

/// g^o = S g^i; v_L = Pi^+ g^i + Pi^- g^o, v_R = Pi^- g^i + Pi^+ g^o.
BoundaryPair solve_homogeneous_data(const ScatteringAssembly& assembly,
                                    const CircleForm& g_in);

/// Random mean-zero form with independent standard normal coefficients on
/// 0 < |k| <= band and zero above.
CircleForm random_band_form(int K, int band, std::uint64_t seed);

struct ScatteringDiagnostics {
  int trials = 0;
  double unitarity_defect_h_half = 0.0;       // max relative change of ||.||_{1/2}
  double unitarity_defect_h_minus_half = 0.0; // same for ||.||_{-1/2}
  double flux_balance_defect = 0.0;           // weights |k|, relative
  double primitive_flux_balance_defect = 0.0; // weights 1/|k|, relative
  double transport_residual = 0.0;            // ||v_L - B v_R|| on the band
};

/// Runs `trials` random inner-band inputs through S and measures norm
/// preservation and flux balance in both Sobolev weightings.
ScatteringDiagnostics diagnose_scattering(const ScatteringAssembly& assembly,
                                          int trials, std::uint64_t seed);

}  // namespace subwave
