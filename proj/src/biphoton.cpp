#include "nlint/biphoton.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "nlint/errors.hpp"
#include "nlint/units.hpp"

namespace nlint {

namespace {

constexpr cplx kI{0.0, 1.0};

// Pump amplitude at every lattice sum Ws + Wi = (k - (n - 1)) * step, so the
// anti-diagonal sees an exact zero detuning.
std::vector<double> pump_on_diagonals(const PumpPulse& pump, const FrequencyGrid& grid) {
  const std::size_t n = grid.size();
  std::vector<double> fp(2 * n - 1);
  for (std::size_t k = 0; k < fp.size(); ++k) {
    const double omega_p =
        (static_cast<double>(k) - static_cast<double>(n - 1)) * grid.step();
    fp[k] = pump_amplitude(pump, omega_p);
  }
  return fp;
}

// Unnormalized kernel shape; sigma L and global phases do not survive normalization.
cplx kernel_shape(Kernel kernel, const CrystalParams& crystal, const PumpPulse& pump,
                  double fp, double ws, double wi) {
  if (kernel == Kernel::Exact)
    return kI * fp * sinc(0.5 * crystal.phase_mismatch(ws, wi) * crystal.length());
  return biphoton_gaussian(crystal, pump, ws, wi);
}

}  // namespace

double sinc(double x) noexcept {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

cplx biphoton_exact(const CrystalParams& crystal, const PumpPulse& pump, double omega_s,
                    double omega_i, double global_phase) noexcept {
  const double L = crystal.length();
  const double amplitude = crystal.sigma() * L * pump_amplitude(pump, omega_s + omega_i) *
                           sinc(0.5 * crystal.phase_mismatch(omega_s, omega_i) * L);
  return kI * amplitude * std::polar(1.0, global_phase);
}

double biphoton_gaussian(const CrystalParams& crystal, const PumpPulse& pump, double omega_s,
                         double omega_i) noexcept {
  const double a = kSincGaussianAlpha;
  const double T0 = pump.T0();
  const double DL = std::abs(crystal.D()) * crystal.length();
  const double plus = omega_s + omega_i;
  const double minus = omega_s - omega_i;
  const double norm = std::sqrt(a * T0 * DL / (std::numbers::sqrt2 * units::pi));
  return norm * std::exp(-0.5 * plus * plus * T0 * T0) *
         std::exp(-a * a * DL * DL * minus * minus / 16.0);
}

cplx biphoton(Kernel kernel, const CrystalParams& crystal, const PumpPulse& pump,
              double omega_s, double omega_i) noexcept {
  if (kernel == Kernel::Exact) return biphoton_exact(crystal, pump, omega_s, omega_i);
  return biphoton_gaussian(crystal, pump, omega_s, omega_i);
}

double JointSpectrum::total_probability() const {
  return amplitude.cwiseAbs2().sum() * grid.step() * grid.step();
}

JointSpectrum joint_spectral_intensity(Kernel kernel, const CrystalParams& crystal,
                                       const PumpPulse& pump, const FrequencyGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto axis = grid.omega_s_axis();
  const std::vector<double> fp = pump_on_diagonals(pump, grid);

  Eigen::MatrixXcd amp(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index s = 0; s < n; ++s) {
      amp(s, i) = kernel_shape(kernel, crystal, pump, fp[static_cast<std::size_t>(s + i)],
                               axis[static_cast<std::size_t>(s)],
                               axis[static_cast<std::size_t>(i)]);
    }
  }
  const double total = amp.cwiseAbs2().sum() * grid.step() * grid.step();
  if (!(total > 0.0) || !std::isfinite(total))
    fail(ErrorKind::Numerical, "joint spectrum vanishes on the grid; cannot normalize");
  amp /= std::sqrt(total);
  return JointSpectrum{grid, std::move(amp), true};
}

double fwhm_of(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) fail(ErrorKind::Analysis, "FWHM needs >= 3 samples");
  const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double half = 0.5 * y[peak];
  if (!(half > 0.0)) fail(ErrorKind::Analysis, "FWHM undefined for a non-positive peak");

  std::size_t lo = peak;
  while (lo > 0 && y[lo] >= half) --lo;
  if (y[lo] >= half) fail(ErrorKind::Analysis, "FWHM undefined: curve clipped at lower edge");
  std::size_t hi = peak;
  while (hi + 1 < y.size() && y[hi] >= half) ++hi;
  if (y[hi] >= half) fail(ErrorKind::Analysis, "FWHM undefined: curve clipped at upper edge");

  auto cross = [&](std::size_t a, std::size_t b) {
    return x[a] + (half - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
  };
  return cross(hi - 1, hi) - cross(lo, lo + 1);
}

namespace {

MarginalSpectrum finish_marginal(std::vector<double> omega, std::vector<double> density,
                                 const CrystalParams& crystal) {
  MarginalSpectrum m;
  m.omega_s = std::move(omega);
  m.density = std::move(density);
  const auto peak = std::max_element(m.density.begin(), m.density.end()) - m.density.begin();
  m.peak_omega = m.omega_s[static_cast<std::size_t>(peak)];
  m.fwhm_rad_per_fs = fwhm_of(m.omega_s, m.density);
  m.fwhm_nm = units::wavelength_width_nm(crystal.lambda_s0_nm(), m.fwhm_rad_per_fs);
  return m;
}

}  // namespace

MarginalSpectrum marginal_spectrum(const JointSpectrum& js, const CrystalParams& crystal) {
  if (!js.normalized) fail(ErrorKind::Precondition, "marginal_spectrum needs a normalized spectrum");
  const double h = js.grid.step();
  const Eigen::VectorXd rows = js.amplitude.cwiseAbs2().rowwise().sum() * h;
  std::vector<double> density(rows.data(), rows.data() + rows.size());
  const auto axis = js.grid.omega_s_axis();
  return finish_marginal({axis.begin(), axis.end()}, std::move(density), crystal);
}

MarginalSpectrum marginal_spectrum_streamed(Kernel kernel, const CrystalParams& crystal,
                                            const PumpPulse& pump, const FrequencyGrid& grid) {
  const std::size_t n = grid.size();
  const auto axis = grid.omega_s_axis();
  const std::vector<double> fp = pump_on_diagonals(pump, grid);
  std::vector<double> density(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double row = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      row += std::norm(kernel_shape(kernel, crystal, pump, fp[s + i], axis[s], axis[i]));
    density[s] = row;
  }
  const double h = grid.step();
  const double total = std::accumulate(density.begin(), density.end(), 0.0) * h * h;
  if (!(total > 0.0)) fail(ErrorKind::Numerical, "joint spectrum vanishes on the grid");
  for (double& d : density) d *= h / total;
  return finish_marginal({axis.begin(), axis.end()}, std::move(density), crystal);
}

// Schmidt decomposition ----------------------------------------------------------

namespace {

std::vector<double> singular_values(const Eigen::MatrixXcd& m) {
  const auto rows = static_cast<lapack_int>(m.rows());
  const auto cols = static_cast<lapack_int>(m.cols());
  std::vector<double> s(static_cast<std::size_t>(std::min(rows, cols)));
  lapack_int info = 0;
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::MatrixXd a = m.real();
    info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, a.data(), rows, s.data(), nullptr,
                          1, nullptr, 1);
  } else if (m.real().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::MatrixXd a = m.imag();
    info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, a.data(), rows, s.data(), nullptr,
                          1, nullptr, 1);
  } else {
    Eigen::MatrixXcd a = m;
    info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, a.data(), rows, s.data(), nullptr,
                          1, nullptr, 1);
  }
  if (info != 0)
    fail(ErrorKind::Numerical, "singular value decomposition failed (info=" +
                                   std::to_string(info) + ") on a " + std::to_string(rows) +
                                   "x" + std::to_string(cols) + " matrix");
  return s;
}

}  // namespace

SchmidtReport schmidt_decompose(const Eigen::MatrixXcd& weighted) {
  if (weighted.size() == 0) fail(ErrorKind::Precondition, "Schmidt decomposition of an empty matrix");
  if (!weighted.allFinite()) fail(ErrorKind::Numerical, "Schmidt input contains non-finite values");
  const std::vector<double> s = singular_values(weighted);

  double total = 0.0;
  for (double v : s) total += v * v;
  if (!(total > 0.0)) fail(ErrorKind::Numerical, "Schmidt input is identically zero");

  SchmidtReport report;
  report.singular_ratio = s.size() > 1 ? s[1] / s[0] : 0.0;
  double purity = 0.0;
  for (double v : s) {
    const double lambda = v * v / total;
    purity += lambda * lambda;
    if (lambda > 0.0) report.entropy_bits -= lambda * std::log2(lambda);
    // Below this the values are rounding noise of the decomposition.
    if (lambda > 1e-18) report.coefficients.push_back(lambda);
  }
  report.schmidt_number = 1.0 / purity;
  report.entropy_bits = std::max(report.entropy_bits, 0.0);
  return report;
}

SchmidtReport schmidt_analysis(const JointSpectrum& js) {
  if (!js.normalized) fail(ErrorKind::Precondition, "schmidt_analysis needs a normalized spectrum");
  if (js.grid.quasi_cw())
    fail(ErrorKind::Resolution, "Schmidt number needs the pump spectrum resolved by at least 8 of the " +
                                    std::to_string(js.grid.size()) +
                                    " grid points; the grid is quasi-CW");
  // sqrt(dWs dWi) with equal steps.
  try {
    return schmidt_decompose(js.amplitude * js.grid.step());
  } catch (const Error& e) {
    fail(e.kind(), std::string(e.what()) + " (grid " + std::to_string(js.grid.size()) +
                       " points, step " + std::to_string(js.grid.step()) + " rad/fs)");
  }
}

}  // namespace nlint
