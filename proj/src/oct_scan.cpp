#include "nlint/oct_scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nlint/errors.hpp"
#include "nlint/units.hpp"

namespace nlint {

using units::c_mm_per_fs;

DeltaZScan DeltaZScan::with_step(double start_mm, double stop_mm, double step_mm) {
  if (!(step_mm > 0.0) || !(stop_mm >= start_mm))
    fail(ErrorKind::Validation, "scan needs stop >= start and a positive step");
  DeltaZScan s;
  s.start_mm = start_mm;
  s.points = static_cast<std::size_t>(std::floor((stop_mm - start_mm) / step_mm)) + 1;
  s.stop_mm = start_mm + static_cast<double>(s.points - 1) * step_mm;
  return s;
}

std::vector<double> DeltaZScan::values() const {
  std::vector<double> v(points);
  if (points == 1) {
    v[0] = start_mm;
    return v;
  }
  const double step = (stop_mm - start_mm) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) v[k] = start_mm + static_cast<double>(k) * step;
  return v;
}

double DeltaZScan::reach() const noexcept { return std::max(std::abs(start_mm), std::abs(stop_mm)); }

DeltaZScan auto_scan(const CrystalParams& crystal, const PumpPulse& pump,
                     const SampleModel& sample, double fringe_step_mm, std::size_t points) {
  const double DL = std::abs(crystal.D()) * crystal.length();
  const double a = 1.0 - 2.0 * crystal.D_plus() / crystal.D();
  // Gaussian factor of g1 falls below 1e-4 beyond |a T1| = 12.2 T0.
  const double gauss_half = a != 0.0 ? 12.2 * pump.T0() / std::abs(a)
                                     : std::numeric_limits<double>::infinity();
  const double half = std::min(DL, gauss_half);

  std::vector<double> delays{0.0};
  if (const auto* b = std::get_if<BilayerSample>(&sample.variant()); b && b->r1 != 0.0)
    delays.push_back(b->delay_fs());

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double tau : delays) {
    double centre = -tau;
    if (gauss_half < DL) centre = std::clamp(2.0 * tau / a - tau, -tau - DL, -tau + DL);
    lo = std::min(lo, centre - 1.25 * half);
    hi = std::max(hi, centre + 1.25 * half);
  }
  if (fringe_step_mm > 0.0)
    return DeltaZScan::with_step(c_mm_per_fs * lo, c_mm_per_fs * hi, fringe_step_mm);
  if (points < 2) fail(ErrorKind::Validation, "scan needs at least two points");
  return DeltaZScan{c_mm_per_fs * lo, c_mm_per_fs * hi, points};
}

std::vector<double> Interferogram::flux() const {
  std::vector<double> out(flux_norm.size());
  std::transform(flux_norm.begin(), flux_norm.end(), out.begin(),
                 [this](double f) { return f * ns1; });
  return out;
}

Interferogram interferogram_bilayer(const CrystalParams& crystal, const PumpPulse& pump,
                                    const InterferometerGeometry& geometry,
                                    const BilayerSample& sample, const DeltaZScan& scan) {
  geometry.validate();
  if (std::abs(timing_from_geometry(geometry, crystal).T2) > 1e-3)
    fail(ErrorKind::Precondition,
         "interferogram_bilayer needs T2 = 0; call synchronize_pump_path first");

  const double tau = sample.delay_fs();
  const double kp = crystal.omega_p0() / c_mm_per_fs;
  const double ki = crystal.omega_i0() / c_mm_per_fs;
  const double ks = crystal.omega_s0() / c_mm_per_fs;
  const double idler_optical_path = geometry.z2 + crystal.idler_phase_index() * crystal.length();

  Interferogram ifg;
  ifg.delta_z = scan.values();
  ifg.flux_norm.resize(ifg.delta_z.size());
  ifg.envelope.resize(ifg.delta_z.size());
  ifg.ns1 = photon_number(crystal);
  for (std::size_t k = 0; k < ifg.delta_z.size(); ++k) {
    const InterferometerGeometry g = geometry_at_delta_z(geometry, crystal, ifg.delta_z[k]);
    const Timing t = timing_from_geometry(g, crystal);
    const Timing t_back{t.T1 + tau, t.T2 - tau, 0.0};
    const double g_front = g1_analytic(t, crystal, pump);
    const double g_back = g1_analytic(t_back, crystal, pump);
    const double carrier = kp * (g.zp2 - g.zp1) - ki * idler_optical_path - ks * (g.z1 - g.z3);
    const double carrier_back = carrier - sample.carrier_omega * tau;
    ifg.flux_norm[k] =
        1.0 + sample.r0 * g_front * std::sin(carrier) + sample.r1 * g_back * std::sin(carrier_back);
    ifg.envelope[k] = std::abs(sample.r0) * g_front + std::abs(sample.r1) * g_back;
  }
  return ifg;
}

Interferogram interferogram_numeric(const CrystalParams& crystal, const PumpPulse& pump,
                                    const InterferometerGeometry& geometry,
                                    const SampleModel& sample, const DeltaZScan& scan,
                                    const CoherenceQuadrature& quadrature) {
  const CoherenceIntegrator integrator(crystal, pump, geometry, sample, quadrature, scan.reach());
  Interferogram ifg;
  ifg.delta_z = scan.values();
  const std::vector<cplx> g1 = integrator.scan_delta_z(ifg.delta_z);
  ifg.flux_norm.resize(g1.size());
  ifg.envelope.resize(g1.size());
  for (std::size_t k = 0; k < g1.size(); ++k) {
    // One output port of a 50:50 splitter: N = N_s1 (1 + Im g1).
    ifg.flux_norm[k] = 1.0 + g1[k].imag();
    ifg.envelope[k] = std::abs(g1[k]);
  }
  ifg.ns1 = photon_number(crystal);
  return ifg;
}

namespace {

struct Peak {
  std::size_t index;
  double position;
  double fwhm;
};

double half_crossing(const std::vector<double>& x, const std::vector<double>& e, std::size_t k,
                     int direction) {
  const double height = e[k];
  const double half = 0.5 * height;
  std::size_t j = k;
  while (e[j] >= half) {
    if (e[j] > height) return std::numeric_limits<double>::quiet_NaN();
    if ((direction < 0 && j == 0) || (direction > 0 && j + 1 == e.size()))
      fail(ErrorKind::Analysis, "envelope clipped at the scan edge");
    j = direction < 0 ? j - 1 : j + 1;
  }
  const std::size_t inner = direction < 0 ? j + 1 : j - 1;
  return x[j] + (half - e[j]) * (x[inner] - x[j]) / (e[inner] - e[j]);
}

std::vector<Peak> find_peaks(const Interferogram& ifg) {
  const auto& e = ifg.envelope;
  const auto& x = ifg.delta_z;
  if (e.size() < 3 || e.size() != x.size())
    fail(ErrorKind::Analysis, "envelope needs at least three samples");
  const double top = *std::max_element(e.begin(), e.end());
  if (!(top > 0.0)) fail(ErrorKind::Analysis, "envelope is identically zero");
  if (e.front() > 0.01 * top || e.back() > 0.01 * top)
    fail(ErrorKind::Analysis, "envelope clipped at the scan edge; widen the scan");

  std::vector<Peak> peaks;
  for (std::size_t k = 1; k + 1 < e.size(); ++k) {
    if (!(e[k] > e[k - 1] && e[k] >= e[k + 1] && e[k] >= 0.1 * top)) continue;
    const double curvature = e[k - 1] - 2.0 * e[k] + e[k + 1];
    double offset = curvature < 0.0 ? 0.5 * (e[k - 1] - e[k + 1]) / curvature : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    const double position = x[k] + offset * (x[k + 1] - x[k]);
    const double left = half_crossing(x, e, k, -1);
    const double right = half_crossing(x, e, k, +1);
    peaks.push_back({k, position, right - left});
  }
  return peaks;
}

}  // namespace

PeakReport envelope_peaks(const Interferogram& ifg) {
  const std::vector<Peak> peaks = find_peaks(ifg);
  const auto& e = ifg.envelope;
  PeakReport report;
  for (const Peak& p : peaks) {
    report.positions_mm.push_back(p.position);
    report.fwhm_um.push_back(p.fwhm * units::um_per_mm);
  }
  for (std::size_t k = 1; k < peaks.size(); ++k) {
    report.separations_um.push_back((peaks[k].position - peaks[k - 1].position) *
                                    units::um_per_mm);
    const auto first = e.begin() + static_cast<std::ptrdiff_t>(peaks[k - 1].index);
    const auto last = e.begin() + static_cast<std::ptrdiff_t>(peaks[k].index) + 1;
    const double valley = *std::min_element(first, last);
    const double lower = std::min(e[peaks[k - 1].index], e[peaks[k].index]);
    if (lower - valley >= 0.5 * lower) report.resolved = true;
  }
  return report;
}

double predicted_peak_shift(const CrystalParams& crystal) {
  const double den = crystal.D() - 2.0 * crystal.D_plus();
  if (std::abs(den) < 1e-12 * std::abs(crystal.D()))
    fail(ErrorKind::Domain, "predicted_peak_shift: D - 2 D_plus vanishes");
  return (crystal.D() + 2.0 * crystal.D_plus()) / den;
}

double axial_resolution(const Interferogram& ifg) {
  const std::vector<Peak> peaks = find_peaks(ifg);
  if (peaks.empty()) fail(ErrorKind::Analysis, "no envelope peak found");
  const auto strongest = std::max_element(peaks.begin(), peaks.end(), [&](const Peak& a, const Peak& b) {
    return ifg.envelope[a.index] < ifg.envelope[b.index];
  });
  if (std::isnan(strongest->fwhm))
    fail(ErrorKind::Analysis, "axial resolution undefined: overlapping layers mask the half height");
  return strongest->fwhm * units::um_per_mm;
}

std::vector<double> fringe_envelope(const Interferogram& ifg, double fringe_period_mm) {
  const auto& x = ifg.delta_z;
  const auto& f = ifg.flux_norm;
  std::vector<double> out(f.size(), 0.0);
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    while (x[lo] < x[k] - 0.5 * fringe_period_mm) ++lo;
    while (hi + 1 < f.size() && x[hi + 1] <= x[k] + 0.5 * fringe_period_mm) ++hi;
    const auto [mn, mx] = std::minmax_element(f.begin() + static_cast<std::ptrdiff_t>(lo),
                                              f.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    out[k] = 0.5 * (*mx - *mn);
  }
  return out;
}

}  // namespace nlint
