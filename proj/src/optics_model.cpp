#include "nlint/optics_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlint/errors.hpp"
#include "nlint/units.hpp"

namespace nlint {

namespace {

bool finite(double x) { return std::isfinite(x); }

// Full width (rad/fs) over which |F_p|^2 stays above 1e-6 of its peak.
double pump_support_width(double T0) { return 2.0 * std::sqrt(std::log(1e6)) / T0; }

// Main phase-matching lobe between the first zeros of sinc(D L Ws / 2).
double phase_matching_width(const CrystalParams& c) {
  return 4.0 * units::pi / (std::abs(c.D()) * c.length());
}

constexpr std::size_t kMinGridPoints = 256;
constexpr double kMinPointsPerFeature = 8.0;

}  // namespace

CrystalParams::CrystalParams(const CrystalFields& fields) : f_(fields) {
  if (!finite(f_.length_mm) || f_.length_mm <= 0.0)
    fail(ErrorKind::Validation, "crystal.length_mm must be positive");
  if (!finite(f_.D) || f_.D == 0.0)
    fail(ErrorKind::Validation, "crystal.D must be finite and non-zero");
  if (!finite(f_.D_plus)) fail(ErrorKind::Validation, "crystal.D_plus must be finite");
  if (!finite(f_.N_i)) fail(ErrorKind::Validation, "crystal.N_i must be finite");
  if (!finite(f_.sigma) || f_.sigma < 0.0)
    fail(ErrorKind::Validation, "crystal.sigma must be non-negative");
  if (!finite(f_.idler_phase_index) || f_.idler_phase_index < 0.0)
    fail(ErrorKind::Validation, "crystal.idler_phase_index must be non-negative");
  for (double lambda : {f_.lambda_p_nm, f_.lambda_s_nm, f_.lambda_i_nm}) {
    if (!finite(lambda) || lambda <= 0.0)
      fail(ErrorKind::Validation, "crystal wavelengths must be positive");
  }
  const double inv_p = 1.0 / f_.lambda_p_nm;
  const double inv_si = 1.0 / f_.lambda_s_nm + 1.0 / f_.lambda_i_nm;
  if (std::abs(inv_p - inv_si) > 1e-3 * inv_p)
    fail(ErrorKind::Validation,
         "crystal wavelengths violate energy conservation 1/lp = 1/ls + 1/li (0.1 %)");

  omega_p0_ = units::omega_from_wavelength_nm(f_.lambda_p_nm);
  omega_s0_ = units::omega_from_wavelength_nm(f_.lambda_s_nm);
  omega_i0_ = units::omega_from_wavelength_nm(f_.lambda_i_nm);
}

CrystalParams CrystalParams::mgo_ln_532(double length_mm, double sigma) {
  CrystalFields f;
  f.length_mm = length_mm;
  f.D = -263.50;
  f.D_plus = 780.0;
  // Group index 2.18 and phase index 2.138 of MgO:LiNbO3 near 1550 nm.
  f.N_i = 2.18 / units::c_mm_per_fs;
  f.idler_phase_index = 2.138;
  f.lambda_p_nm = 532.0;
  f.lambda_s_nm = 810.0;
  f.lambda_i_nm = 1550.0;
  f.sigma = sigma;
  return CrystalParams(f);
}

double CrystalParams::idler_phase_index() const noexcept {
  return f_.idler_phase_index > 0.0 ? f_.idler_phase_index : units::c_mm_per_fs * f_.N_i;
}

CrystalParams CrystalParams::with_length(double length_mm) const {
  CrystalFields f = f_;
  f.length_mm = length_mm;
  return CrystalParams(f);
}

CrystalParams CrystalParams::with_D_plus(double D_plus) const {
  CrystalFields f = f_;
  f.D_plus = D_plus;
  return CrystalParams(f);
}

PumpPulse::PumpPulse(double T0_fs) : T0_(T0_fs) {
  if (!finite(T0_fs) || T0_fs <= 0.0) fail(ErrorKind::Validation, "pump.T0 must be positive");
}

PumpPulse PumpPulse::from_ps(double T0_ps) { return PumpPulse(T0_ps * units::fs_per_ps); }

double pump_amplitude(const PumpPulse& pump, double omega_p_detuning) noexcept {
  const double T0 = pump.T0();
  const double x = omega_p_detuning * T0;
  return std::sqrt(T0) / std::pow(units::pi, 0.25) * std::exp(-0.5 * x * x);
}

void InterferometerGeometry::validate() const {
  for (double z : {z1, z2, z3, zp1, zp2}) {
    if (!finite(z)) fail(ErrorKind::Validation, "geometry path lengths must be finite");
  }
}

// Samples ------------------------------------------------------------------

double BilayerSample::delay_fs() const noexcept {
  return 2.0 * thickness_um * layer_index / units::c_um_per_fs;
}

BilayerSample BilayerSample::from_fresnel(double n_ambient, double n_layer, double n_substrate,
                                          double thickness_um, double carrier_omega) {
  if (n_ambient <= 0.0 || n_layer <= 0.0 || n_substrate <= 0.0)
    fail(ErrorKind::Validation, "sample refractive indices must be positive");
  const double r01 = (n_ambient - n_layer) / (n_ambient + n_layer);
  const double r12 = (n_layer - n_substrate) / (n_layer + n_substrate);
  const double t01 = 2.0 * n_ambient / (n_ambient + n_layer);
  const double t10 = 2.0 * n_layer / (n_layer + n_ambient);
  BilayerSample s;
  s.r0 = r01;
  s.r1 = t01 * r12 * t10;
  s.thickness_um = thickness_um;
  s.layer_index = n_layer;
  s.carrier_omega = carrier_omega;
  return s;
}

SampleModel SampleModel::uniform(cplx r) {
  if (!finite(r.real()) || !finite(r.imag()) || std::abs(r) > 1.0 + 1e-12)
    fail(ErrorKind::Validation, "sample.r must satisfy |r| <= 1");
  return SampleModel(UniformSample{r});
}

SampleModel SampleModel::bilayer(const BilayerSample& s) {
  if (!finite(s.r0) || !finite(s.r1) || std::abs(s.r0) + std::abs(s.r1) > 1.0 + 1e-12)
    fail(ErrorKind::Validation, "sample: bilayer requires |r0| + |r1| <= 1");
  if (!finite(s.thickness_um) || s.thickness_um < 0.0)
    fail(ErrorKind::Validation, "sample.thickness_um must be non-negative");
  if (!finite(s.layer_index) || s.layer_index <= 0.0)
    fail(ErrorKind::Validation, "sample.n_layer must be positive");
  if (!finite(s.carrier_omega))
    fail(ErrorKind::Validation, "sample carrier frequency must be finite");
  return SampleModel(s);
}

SampleModel SampleModel::tabulated(TabulatedSample t) {
  if (t.omega.size() != t.r.size() || t.omega.size() < 2)
    fail(ErrorKind::Validation, "sample table needs at least two (omega, r) rows");
  for (std::size_t k = 0; k < t.omega.size(); ++k) {
    if (!finite(t.omega[k]) || (k > 0 && !(t.omega[k] > t.omega[k - 1])))
      fail(ErrorKind::Validation, "sample table detunings must be strictly increasing");
    if (std::abs(t.r[k]) > 1.0 + 1e-12)
      fail(ErrorKind::Validation, "sample table entries must satisfy |r| <= 1");
  }
  return SampleModel(std::move(t));
}

double SampleModel::max_delay_fs() const noexcept {
  if (const auto* b = std::get_if<BilayerSample>(&v_)) return std::abs(b->delay_fs());
  return 0.0;
}

cplx sample_reflectivity(const SampleModel& sample, double omega) {
  struct Visitor {
    double omega;
    cplx operator()(const UniformSample& u) const { return u.r; }
    cplx operator()(const BilayerSample& b) const {
      return b.r0 + b.r1 * std::polar(1.0, (b.carrier_omega + omega) * b.delay_fs());
    }
    cplx operator()(const TabulatedSample& t) const {
      if (omega < t.omega.front() || omega > t.omega.back())
        fail(ErrorKind::Range, "sample table does not cover detuning " + std::to_string(omega) +
                                   " rad/fs");
      auto hi = std::upper_bound(t.omega.begin(), t.omega.end(), omega);
      if (hi == t.omega.end()) return t.r.back();
      const auto k = static_cast<std::size_t>(hi - t.omega.begin());
      const double w = (omega - t.omega[k - 1]) / (t.omega[k] - t.omega[k - 1]);
      return (1.0 - w) * t.r[k - 1] + w * t.r[k];
    }
  };
  return std::visit(Visitor{omega}, sample.variant());
}

// Coupling -------------------------------------------------------------------

double nonlinear_sigma(const NonlinearCouplingInputs& in) {
  constexpr double hbar = 1.054571817e-34;    // J s
  constexpr double eps0 = 8.8541878128e-12;   // F/m
  constexpr double c = 2.99792458e8;          // m/s
  constexpr double per_fs = 1e15;

  if (!(in.pump_photons_per_pulse >= 0.0))
    fail(ErrorKind::Domain, "nonlinear_sigma: photon number must be non-negative");
  for (double v : {in.chi2_m_per_V, in.area_m2, in.n_p, in.n_s, in.n_i, in.omega_p0,
                   in.omega_s0, in.omega_i0}) {
    if (!(v > 0.0) || !finite(v))
      fail(ErrorKind::Domain, "nonlinear_sigma: inputs must be positive");
  }
  const double wp = in.omega_p0 * per_fs;
  const double ws = in.omega_s0 * per_fs;
  const double wi = in.omega_i0 * per_fs;
  const double num = hbar * wp * ws * wi * in.chi2_m_per_V * in.chi2_m_per_V *
                     in.pump_photons_per_pulse;
  const double den = 16.0 * units::pi * eps0 * c * c * c * in.n_p * in.n_s * in.n_i * in.area_m2;
  const double sigma_si = std::sqrt(num / den);  // s^{1/2} / m
  return sigma_si * std::sqrt(per_fs) / 1e3;     // fs^{1/2} / mm
}

double gamma_param(const CrystalParams& crystal, const PumpPulse& pump) noexcept {
  return kSincGaussianAlpha * std::abs(crystal.D()) * crystal.length() /
         (2.0 * std::numbers::sqrt2 * pump.T0());
}

// Grid -------------------------------------------------------------------------

std::string to_string(Kernel kernel) {
  return kernel == Kernel::Exact ? "exact" : "gaussian";
}

FrequencyGrid::FrequencyGrid(std::size_t points, double half_width, bool quasi_cw)
    : axis_(points), half_width_(half_width), quasi_cw_(quasi_cw) {
  if (points < 2 || !(half_width > 0.0))
    fail(ErrorKind::Resolution, "frequency grid needs >= 2 points and a positive span");
  step_ = 2.0 * half_width / static_cast<double>(points - 1);
  const double centre = 0.5 * static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k)
    axis_[k] = (static_cast<double>(k) - centre) * step_;
}

double required_half_width(const CrystalParams& crystal, const PumpPulse& pump,
                           Kernel kernel) noexcept {
  const double T0 = pump.T0();
  const double absD = std::abs(crystal.D());
  const double D_plus = kernel == Kernel::Gaussian ? 0.0 : crystal.D_plus();
  // Along the Dk = 0 ridge, Ws and Wi scale with the pump detuning by
  // (D_plus -+ D/2)/D.
  const double tilt =
      std::max(std::abs(D_plus - 0.5 * crystal.D()), std::abs(D_plus + 0.5 * crystal.D())) / absD;
  return std::max({6.0 / T0, 24.0 / (absD * crystal.length()), 6.0 * tilt / T0});
}

FrequencyGrid make_frequency_grid(const CrystalParams& crystal, const PumpPulse& pump,
                                  std::size_t n_points, Kernel kernel) {
  if (n_points < kMinGridPoints)
    fail(ErrorKind::Resolution, "frequency grid needs at least 256 points per axis, got " +
                                    std::to_string(n_points));
  const double half_width = required_half_width(crystal, pump, kernel);
  const double step = 2.0 * half_width / static_cast<double>(n_points - 1);

  const double pm_points = phase_matching_width(crystal) / step;
  if (pm_points < kMinPointsPerFeature)
    fail(ErrorKind::Resolution, "grid step " + std::to_string(step) +
                                    " rad/fs leaves fewer than 8 points across the "
                                    "phase-matching lobe");
  // A pump spanning fewer than 8 steps is treated as quasi-CW rather than
  // rejected: every row still sees the same set of lattice pump samples, so
  // marginals and g1 stay exact while the Schmidt number becomes undefined.
  const bool quasi_cw = pump_support_width(pump.T0()) / step < kMinPointsPerFeature;
  return FrequencyGrid(n_points, half_width, quasi_cw);
}

}  // namespace nlint
