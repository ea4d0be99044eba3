#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "nlint/biphoton.hpp"
#include "nlint/oct_scan.hpp"
#include "support.hpp"

using namespace nlint;

namespace {

constexpr double kC_um_per_fs = 0.299792458;

struct Config {
  double L, T0;
};
constexpr Config kSlabConfigs[] = {{0.5, 1e5}, {10.0, 1e5}, {10.0, 100.0}};

InterferometerGeometry synced(const CrystalParams& c) {
  return synchronize_pump_path(InterferometerGeometry{100.0, 50.0, 0.0, 10.0, 0.0}, c);
}

BilayerSample slab(const CrystalParams& c) {
  return BilayerSample::from_fresnel(1.0, 1.5, 1.3, 20.0, c.omega_i0());
}

Interferogram slab_scan(const Config& k, double step_mm = 810e-6 / 8) {
  const auto c = CrystalParams::mgo_ln_532(k.L);
  const PumpPulse p(k.T0);
  const auto s = slab(c);
  const auto scan = auto_scan(c, p, SampleModel::bilayer(s), step_mm);
  return interferogram_bilayer(c, p, synced(c), s, scan);
}

Interferogram mirror_scan(const Config& k, double step_mm = 810e-6 / 8) {
  const auto c = CrystalParams::mgo_ln_532(k.L);
  const PumpPulse p(k.T0);
  BilayerSample m;
  m.r0 = 1.0;
  m.carrier_omega = c.omega_i0();
  const auto scan = auto_scan(c, p, SampleModel::mirror(), step_mm);
  return interferogram_bilayer(c, p, synced(c), m, scan);
}

Interferogram synthetic(const std::vector<std::pair<double, double>>& peaks, double width) {
  Interferogram ifg;
  for (int k = 0; k <= 2000; ++k) {
    const double x = -1.0 + k * 1e-3;
    double e = 0.0;
    for (auto [pos, h] : peaks) e += h * std::exp(-0.5 * (x - pos) * (x - pos) / (width * width));
    ifg.delta_z.push_back(x);
    ifg.envelope.push_back(e);
    ifg.flux_norm.push_back(1.0);
  }
  return ifg;
}

}  // namespace

TEST_CASE("peak-shift factor") {
  const auto c = CrystalParams::mgo_ln_532(10.0);
  const double shift = predicted_peak_shift(c);
  CHECK(shift == doctest::Approx((-263.5 + 1560.0) / (-263.5 - 1560.0)));
  CHECK(std::abs(shift + 0.71) <= 0.005);
  CHECK(predicted_peak_shift(c.with_D_plus(0.0)) == 1.0);
  CHECK_FAILS_WITH(predicted_peak_shift(c.with_D_plus(-131.75)), ErrorKind::Domain);
}

TEST_CASE("closed-form interferogram needs synchronized pump paths") {
  const auto c = CrystalParams::mgo_ln_532(0.5);
  const PumpPulse p(1e5);
  auto geo = synced(c);
  geo.zp2 += 0.01;
  const auto scan = auto_scan(c, p, SampleModel::bilayer(slab(c)), 0.0, 51);
  CHECK_FAILS_WITH(interferogram_bilayer(c, p, geo, slab(c), scan), ErrorKind::Precondition);
}

TEST_CASE("glass-slab peak reports") {
  const auto a = envelope_peaks(slab_scan(kSlabConfigs[0]));
  REQUIRE(a.positions_mm.size() == 2);
  REQUIRE(a.separations_um.size() == 1);
  CHECK(std::abs(a.separations_um[0] - 60.0) <= 1.0);
  CHECK(a.resolved);
  CHECK(a.positions_mm[0] < a.positions_mm[1]);

  const auto b = envelope_peaks(slab_scan(kSlabConfigs[1]));
  CHECK_FALSE(b.resolved);

  const auto c = envelope_peaks(slab_scan(kSlabConfigs[2]));
  REQUIRE(c.separations_um.size() == 1);
  CHECK(std::abs(c.separations_um[0] - 42.0) <= 2.0);

  // Separation over c tau equals |(D + 2 D_plus) / (D - 2 D_plus)| within 5 %.
  const auto crystal = CrystalParams::mgo_ln_532(10.0);
  const double c_tau_um = slab(crystal).delay_fs() * kC_um_per_fs;
  CHECK(c.separations_um[0] / c_tau_um ==
        doctest::Approx(std::abs(predicted_peak_shift(crystal))).epsilon(0.05));
}

TEST_CASE("numeric interferogram reproduces the closed form for the slab") {
  for (const Config& k : kSlabConfigs) {
    const auto c = CrystalParams::mgo_ln_532(k.L);
    const PumpPulse p(k.T0);
    const auto s = slab(c);
    const auto scan = auto_scan(c, p, SampleModel::bilayer(s), 0.0, 201);
    const auto closed = interferogram_bilayer(c, p, synced(c), s, scan);
    const auto numeric = interferogram_numeric(c, p, synced(c), SampleModel::bilayer(s), scan);
    double worst = 0.0;
    for (std::size_t j = 0; j < scan.points; ++j)
      worst = std::max(worst, std::abs(closed.flux_norm[j] - numeric.flux_norm[j]));
    CAPTURE(k.L);
    CAPTURE(k.T0);
    CHECK(worst < 1e-3);
    CHECK(numeric.ns1 == closed.ns1);
  }
}

TEST_CASE("mirror gives one peak at delta_z = 0") {
  const auto c = CrystalParams::mgo_ln_532(5.0);
  const PumpPulse p(2000.0);
  const auto scan = auto_scan(c, p, SampleModel::mirror(), 0.0, 201);
  const auto ifg = interferogram_numeric(c, p, synced(c), SampleModel::mirror(), scan);
  const auto r = envelope_peaks(ifg);
  REQUIRE(r.positions_mm.size() == 1);
  CHECK(std::abs(r.positions_mm[0]) < 2.0 * (scan.stop_mm - scan.start_mm) / 200.0);
  CHECK(r.separations_um.empty());
  CHECK_FALSE(r.resolved);
}

TEST_CASE("axial resolution of the three configurations") {
  const double a = 1.0 - 2.0 * 780.0 / -263.5;
  const double gauss_fwhm_um = 8.0 * std::sqrt(std::log(2.0)) * 100.0 / std::abs(a) * kC_um_per_fs;

  const double fa = axial_resolution(mirror_scan(kSlabConfigs[0]));
  const double fb = axial_resolution(mirror_scan(kSlabConfigs[1], 0.0));
  const double fc = axial_resolution(mirror_scan(kSlabConfigs[2]));
  CHECK(fa == doctest::Approx(kC_um_per_fs * 263.5 * 0.5).epsilon(0.05));
  CHECK(fb == doctest::Approx(kC_um_per_fs * 263.5 * 10.0).epsilon(0.05));
  CHECK(fc == doctest::Approx(gauss_fwhm_um).epsilon(0.10));
  CHECK(std::abs(fc - 29.0) <= 2.9);

  // Broader spectrum, finer resolution.
  std::vector<std::pair<double, double>> pairs;
  const double axial[] = {fa, fb, fc};
  for (int k = 0; k < 3; ++k) {
    const auto c = CrystalParams::mgo_ln_532(kSlabConfigs[k].L);
    const PumpPulse p(kSlabConfigs[k].T0);
    pairs.emplace_back(
        marginal_spectrum_streamed(Kernel::Exact, c, p, make_frequency_grid(c, p, 2048)).fwhm_nm,
        axial[k]);
  }
  std::sort(pairs.begin(), pairs.end());
  CHECK(pairs[0].second > pairs[1].second);
  CHECK(pairs[1].second > pairs[2].second);
}

TEST_CASE("fringe period under a z3 scan is the signal wavelength") {
  const auto ifg = mirror_scan(kSlabConfigs[0], 810e-6 / 32);
  std::vector<double> crossings;
  for (std::size_t k = 1; k < ifg.delta_z.size(); ++k) {
    if (ifg.envelope[k] < 0.2) continue;
    const double f0 = ifg.flux_norm[k - 1] - 1.0, f1 = ifg.flux_norm[k] - 1.0;
    if ((f0 < 0.0) != (f1 < 0.0))
      crossings.push_back(ifg.delta_z[k - 1] + f0 * (ifg.delta_z[k] - ifg.delta_z[k - 1]) / (f0 - f1));
  }
  REQUIRE(crossings.size() > 20);
  const double period_nm =
      2.0 * (crossings.back() - crossings.front()) / double(crossings.size() - 1) * 1e6;
  CHECK(period_nm == doctest::Approx(810.0).epsilon(0.01));
}

TEST_CASE("flux stays within the reflectivity bounds") {
  for (const Config& k : kSlabConfigs) {
    const auto ifg = slab_scan(k);
    const double bound = 0.2 + 0.8 * 0.2 / 2.8 * 1.2;
    for (std::size_t j = 0; j < ifg.flux_norm.size(); ++j) {
      CHECK(ifg.flux_norm[j] >= 1.0 - bound - 1e-12);
      CHECK(ifg.flux_norm[j] <= 1.0 + bound + 1e-12);
    }
    const auto flux = ifg.flux();
    CHECK(*std::min_element(flux.begin(), flux.end()) >= 0.0);
  }
}

TEST_CASE("demodulated fringe amplitude agrees with the analytic envelope") {
  const auto ifg = mirror_scan(kSlabConfigs[0], 810e-6 / 16);
  const auto demod = fringe_envelope(ifg, 810e-6);
  const double top = *std::max_element(ifg.envelope.begin(), ifg.envelope.end());
  int checked = 0;
  for (std::size_t k = 0; k < demod.size(); ++k) {
    if (ifg.envelope[k] < 0.1 * top) continue;
    CHECK(demod[k] == doctest::Approx(ifg.envelope[k]).epsilon(0.02));
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("peak finder on synthetic envelopes") {
  const auto apart = envelope_peaks(synthetic({{-0.3, 1.0}, {0.3, 0.6}}, 0.05));
  REQUIRE(apart.positions_mm.size() == 2);
  CHECK(apart.positions_mm[0] == doctest::Approx(-0.3).epsilon(1e-3));
  CHECK(apart.separations_um[0] == doctest::Approx(600.0).epsilon(1e-3));
  CHECK(apart.fwhm_um[0] == doctest::Approx(2.3548 * 50.0).epsilon(1e-3));
  CHECK(apart.resolved);

  // Shallow valley: peaks found but not resolved.
  const auto close = envelope_peaks(synthetic({{-0.06, 1.0}, {0.06, 1.0}}, 0.05));
  CHECK(close.positions_mm.size() == 2);
  CHECK_FALSE(close.resolved);

  // Merged into one.
  CHECK(envelope_peaks(synthetic({{-0.02, 1.0}, {0.02, 1.0}}, 0.05)).positions_mm.size() == 1);

  // Small bumps under 10 % of the maximum are ignored.
  CHECK(envelope_peaks(synthetic({{-0.3, 1.0}, {0.3, 0.05}}, 0.05)).positions_mm.size() == 1);

  CHECK_FAILS_WITH(envelope_peaks(synthetic({{-0.95, 1.0}}, 0.05)), ErrorKind::Analysis);
  Interferogram flat = synthetic({{0.0, 1.0}}, 0.05);
  std::fill(flat.envelope.begin(), flat.envelope.end(), 0.0);
  CHECK_FAILS_WITH(envelope_peaks(flat), ErrorKind::Analysis);
}

TEST_CASE("scan construction") {
  const auto s = DeltaZScan::with_step(-0.1, 0.1, 0.01);
  CHECK(s.points == 21);
  CHECK(s.values().back() == doctest::Approx(0.1));
  CHECK(s.reach() == doctest::Approx(0.1));
  CHECK_FAILS_WITH(DeltaZScan::with_step(0.1, -0.1, 0.01), ErrorKind::Validation);
  CHECK_FAILS_WITH(DeltaZScan::with_step(-0.1, 0.1, 0.0), ErrorKind::Validation);

  const auto c = CrystalParams::mgo_ln_532(0.5);
  const auto auto_s = auto_scan(c, PumpPulse(1e5), SampleModel::bilayer(slab(c)), 0.0, 101);
  CHECK(auto_s.points == 101);
  // Both layers, the back one at -c tau, fit inside.
  CHECK(auto_s.start_mm < -0.06 - 0.5 * 263.5 * 0.5 * 2.99792458e-4);
  CHECK(auto_s.stop_mm > 0.5 * 263.5 * 0.5 * 2.99792458e-4);
}
