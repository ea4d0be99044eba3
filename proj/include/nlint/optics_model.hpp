#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nlint {

using cplx = std::complex<double>;

/// Width parameter of the Gaussian that approximates sinc(x) ~ exp(-alpha^2 x^2).
inline constexpr double kSincGaussianAlpha = 0.455;

/// Nonlinear crystal description, in the units the literature quotes
/// (mm, fs/mm, nm). D and D_plus are stored signed.
struct CrystalFields {
  double length_mm = 0.0;
  double D = 0.0;        // N_i - N_s, fs/mm
  double D_plus = 0.0;   // N_p - (N_s + N_i)/2, fs/mm
  double N_i = 0.0;      // idler inverse group velocity, fs/mm
  double lambda_p_nm = 0.0;
  double lambda_s_nm = 0.0;
  double lambda_i_nm = 0.0;
  double sigma = 1.0;    // gain coefficient, fs^{1/2}/mm
  /// Idler phase index at the central frequency. Zero means "use the group
  /// index c*N_i"; only the constant fringe offset depends on it.
  double idler_phase_index = 0.0;

  bool operator==(const CrystalFields&) const = default;
};

class CrystalParams {
 public:
  /// Validates: L > 0, D != 0, finite group parameters, positive wavelengths
  /// obeying 1/lp = 1/ls + 1/li within 0.1 %, sigma >= 0.
  explicit CrystalParams(const CrystalFields& fields);

  /// MgO:LiNbO3, type-0, 532 nm -> 810 nm + 1550 nm.
  static CrystalParams mgo_ln_532(double length_mm, double sigma = 1.0);

  const CrystalFields& fields() const noexcept { return f_; }

  double length() const noexcept { return f_.length_mm; }
  double D() const noexcept { return f_.D; }
  double D_plus() const noexcept { return f_.D_plus; }
  double N_i() const noexcept { return f_.N_i; }
  double N_s() const noexcept { return f_.N_i - f_.D; }
  double N_p() const noexcept { return f_.D_plus + 0.5 * (N_s() + N_i()); }
  double sigma() const noexcept { return f_.sigma; }

  double lambda_s0_nm() const noexcept { return f_.lambda_s_nm; }
  double omega_p0() const noexcept { return omega_p0_; }
  double omega_s0() const noexcept { return omega_s0_; }
  double omega_i0() const noexcept { return omega_i0_; }
  double idler_phase_index() const noexcept;

  /// First-order phase mismatch Dk = D_plus*(Ws + Wi) + D*(Ws - Wi)/2, in rad/mm.
  double phase_mismatch(double omega_s, double omega_i) const noexcept {
    return f_.D_plus * (omega_s + omega_i) + 0.5 * f_.D * (omega_s - omega_i);
  }

  CrystalParams with_length(double length_mm) const;
  CrystalParams with_D_plus(double D_plus) const;

 private:
  CrystalFields f_;
  double omega_p0_ = 0.0;
  double omega_s0_ = 0.0;
  double omega_i0_ = 0.0;
};

/// Gaussian pump envelope with duration T0 (fs), spectrum normalized so that
/// the integral of |F_p|^2 over detuning is one.
class PumpPulse {
 public:
  explicit PumpPulse(double T0_fs);
  static PumpPulse from_ps(double T0_ps);

  double T0() const noexcept { return T0_; }

 private:
  double T0_;
};

/// Real, positive, even in the detuning. Propagation phases are applied by the
/// coherence kernels.
double pump_amplitude(const PumpPulse& pump, double omega_p_detuning) noexcept;

struct InterferometerGeometry {
  double z1 = 0.0;   // signal 1 to the combining beam splitter, mm
  double z2 = 0.0;   // idler from crystal 1 to the sample, mm
  double z3 = 0.0;   // signal 2 to the combining beam splitter, mm
  double zp1 = 0.0;  // pump to crystal 1, mm
  double zp2 = 0.0;  // pump to crystal 2, mm

  void validate() const;
  bool operator==(const InterferometerGeometry&) const = default;
};

// Sample models ------------------------------------------------------------

struct UniformSample {
  cplx r{1.0, 0.0};

  bool operator==(const UniformSample&) const = default;
};

/// r(W) = r0 + r1 exp[i (w0 + W) tau], tau = 2 d0 n0 / c.
struct BilayerSample {
  double r0 = 0.0;
  double r1 = 0.0;
  double thickness_um = 0.0;
  double layer_index = 1.0;
  double carrier_omega = 0.0;  // rad/fs, the idler central frequency

  double delay_fs() const noexcept;

  /// Normal-incidence Fresnel coefficients for ambient | layer | substrate.
  /// The second-layer echo is t01 * r12 * t10; further round trips are ignored.
  static BilayerSample from_fresnel(double n_ambient, double n_layer, double n_substrate,
                                    double thickness_um, double carrier_omega);

  bool operator==(const BilayerSample&) const = default;
};

/// Piecewise-linear r(W) over strictly increasing detunings.
struct TabulatedSample {
  std::vector<double> omega;
  std::vector<cplx> r;

  bool operator==(const TabulatedSample&) const = default;
};

class SampleModel {
 public:
  using Variant = std::variant<UniformSample, BilayerSample, TabulatedSample>;

  static SampleModel uniform(cplx r);
  static SampleModel mirror() { return uniform({1.0, 0.0}); }
  static SampleModel bilayer(const BilayerSample& layers);
  static SampleModel tabulated(TabulatedSample table);

  const Variant& variant() const noexcept { return v_; }

  /// Largest round-trip delay encoded in the model (fs); zero when unknown.
  double max_delay_fs() const noexcept;

 private:
  explicit SampleModel(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

cplx sample_reflectivity(const SampleModel& sample, double omega_i_detuning);

// Coupling ---------------------------------------------------------------

struct NonlinearCouplingInputs {
  double chi2_m_per_V = 0.0;
  double pump_photons_per_pulse = 0.0;
  double area_m2 = 0.0;
  double n_p = 0.0;
  double n_s = 0.0;
  double n_i = 0.0;
  double omega_p0 = 0.0;  // rad/fs
  double omega_s0 = 0.0;
  double omega_i0 = 0.0;
};

/// Gain coefficient sigma in fs^{1/2}/mm from SI material inputs.
/// Zero pump photons give zero; any other non-positive input is a domain error.
double nonlinear_sigma(const NonlinearCouplingInputs& in);

/// Ratio of pump bandwidth to down-conversion bandwidth, alpha |D| L / (2 sqrt2 T0).
double gamma_param(const CrystalParams& crystal, const PumpPulse& pump) noexcept;

// Frequency grid ---------------------------------------------------------

enum class Kernel { Exact, Gaussian };

std::string to_string(Kernel kernel);

/// Square, uniform, zero-symmetric grid shared by the signal and idler axes.
/// When fewer than 8 steps cover the pump spectrum the grid is flagged
/// quasi-CW: the pump then populates only a few lattice diagonals around
/// Ws + Wi = 0, which normalized marginals tolerate but the Schmidt
/// decomposition does not.
class FrequencyGrid {
 public:
  FrequencyGrid(std::size_t points, double half_width, bool quasi_cw);

  std::span<const double> omega_s_axis() const noexcept { return axis_; }
  std::span<const double> omega_i_axis() const noexcept { return axis_; }
  std::size_t size() const noexcept { return axis_.size(); }
  double step() const noexcept { return step_; }
  double half_width() const noexcept { return half_width_; }
  bool quasi_cw() const noexcept { return quasi_cw_; }

 private:
  std::vector<double> axis_;
  double step_;
  double half_width_;
  bool quasi_cw_;
};

/// Minimum half-width covering the pump, the phase-matching lobe tails and the
/// phase-matching ridge tilted by D_plus.
double required_half_width(const CrystalParams& crystal, const PumpPulse& pump,
                           Kernel kernel = Kernel::Exact) noexcept;

FrequencyGrid make_frequency_grid(const CrystalParams& crystal, const PumpPulse& pump,
                                  std::size_t n_points, Kernel kernel = Kernel::Exact);

}  // namespace nlint
