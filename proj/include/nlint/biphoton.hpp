#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nlint/optics_model.hpp"

namespace nlint {

/// sin(x)/x with sinc(0) = 1.
double sinc(double x) noexcept;

/// Low-gain pair amplitude i sigma L F_p(Ws + Wi) sinc(Dk L / 2), times an
/// optional global phase. D_plus is retained.
cplx biphoton_exact(const CrystalParams& crystal, const PumpPulse& pump, double omega_s,
                    double omega_i, double global_phase = 0.0) noexcept;

/// Normalized two-Gaussian biphoton: sinc replaced by exp(-alpha^2 x^2) and
/// D_plus taken as zero.
double biphoton_gaussian(const CrystalParams& crystal, const PumpPulse& pump, double omega_s,
                         double omega_i) noexcept;

cplx biphoton(Kernel kernel, const CrystalParams& crystal, const PumpPulse& pump,
              double omega_s, double omega_i) noexcept;

/// Discretized Phi(Ws, Wi); rows index Ws, columns index Wi.
struct JointSpectrum {
  FrequencyGrid grid;
  Eigen::MatrixXcd amplitude;
  bool normalized = false;

  double intensity(Eigen::Index s, Eigen::Index i) const { return std::norm(amplitude(s, i)); }
  /// Sum |Phi|^2 dWs dWi.
  double total_probability() const;
};

/// Amplitude on the grid, scaled so that sum |Phi|^2 dWs dWi = 1.
JointSpectrum joint_spectral_intensity(Kernel kernel, const CrystalParams& crystal,
                                       const PumpPulse& pump, const FrequencyGrid& grid);

struct MarginalSpectrum {
  std::vector<double> omega_s;   // rad/fs detuning
  std::vector<double> density;   // S(Ws), integrates to one
  double peak_omega = 0.0;
  double fwhm_rad_per_fs = 0.0;
  double fwhm_nm = 0.0;
};

/// Full width at half maximum of a sampled curve, by linear interpolation of
/// the two half-height crossings around the global maximum. Throws Analysis
/// when a crossing falls outside the samples.
double fwhm_of(std::span<const double> x, std::span<const double> y);

/// S(Ws) = sum_i |Phi|^2 dWi, with its FWHM converted to nm about lambda_s0.
MarginalSpectrum marginal_spectrum(const JointSpectrum& js, const CrystalParams& crystal);

/// Same as marginal_spectrum(joint_spectral_intensity(...)) without storing
/// the matrix; used for grid refinement checks.
MarginalSpectrum marginal_spectrum_streamed(Kernel kernel, const CrystalParams& crystal,
                                            const PumpPulse& pump, const FrequencyGrid& grid);

struct SchmidtReport {
  std::vector<double> coefficients;  // squared Schmidt coefficients, descending
  double schmidt_number = 1.0;       // K = 1 / sum lambda^2
  double entropy_bits = 0.0;         // E = -sum lambda log2 lambda
  double singular_ratio = 0.0;       // s_2 / s_1
};

/// Schmidt decomposition of an already quadrature-weighted amplitude matrix.
SchmidtReport schmidt_decompose(const Eigen::MatrixXcd& weighted);

/// Weights the normalized amplitude by sqrt(dWs dWi) and decomposes it.
SchmidtReport schmidt_analysis(const JointSpectrum& js);

}  // namespace nlint
