#include "nlint/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "nlint/biphoton.hpp"
#include "nlint/errors.hpp"
#include "nlint/units.hpp"

namespace nlint {

using units::c_mm_per_fs;

Timing timing_from_geometry(const InterferometerGeometry& g, const CrystalParams& crystal) {
  const double crystal_delay = crystal.N_i() * crystal.length();
  Timing t;
  t.T1 = (g.z3 - g.z1 + g.z2) / c_mm_per_fs + crystal_delay;
  t.T2 = (g.zp2 - g.zp1 - g.z2) / c_mm_per_fs - crystal_delay;
  t.delta_z = c_mm_per_fs * t.T1;
  return t;
}

InterferometerGeometry synchronize_pump_path(const InterferometerGeometry& g,
                                             const CrystalParams& crystal) {
  InterferometerGeometry out = g;
  out.zp2 = g.zp1 + c_mm_per_fs * crystal.N_i() * crystal.length() + g.z2;
  return out;
}

InterferometerGeometry geometry_at_delta_z(const InterferometerGeometry& g,
                                           const CrystalParams& crystal, double delta_z_mm) {
  InterferometerGeometry out = g;
  out.z3 = delta_z_mm + g.z1 - g.z2 - c_mm_per_fs * crystal.N_i() * crystal.length();
  return out;
}

double tri(double x) noexcept {
  const double a = std::abs(x);
  return a <= 1.0 ? 1.0 - a : 0.0;
}

double g1_analytic(const Timing& t, const CrystalParams& crystal, const PumpPulse& pump) noexcept {
  const double DL = crystal.D() * crystal.length();
  const double shift = (1.0 - 2.0 * crystal.D_plus() / crystal.D()) * t.T1 + 2.0 * t.T2;
  const double T0 = pump.T0();
  return tri(std::abs(t.T1 / DL)) * std::exp(-shift * shift / (16.0 * T0 * T0));
}

double photon_number(const CrystalParams& crystal) {
  if (crystal.D() == 0.0) fail(ErrorKind::Domain, "photon_number: D must be non-zero");
  const double s = crystal.sigma();
  return 2.0 * units::pi * s * s * crystal.length() / std::abs(crystal.D());
}

CoherenceQuadrature CoherenceQuadrature::refined() const {
  CoherenceQuadrature q = *this;
  q.pump_nodes = 2 * pump_nodes - 1;
  q.mismatch_step = 0.5 * mismatch_step;
  return q;
}

unsigned worker_count() {
  if (const char* env = std::getenv("NLINT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

constexpr std::size_t kMaxPumpNodes = 65537;
constexpr std::size_t kMaxLatticeNodes = 40'000'000;

std::vector<double> trapezoid_weights(std::size_t n, double step) {
  std::vector<double> w(n, step);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

std::vector<double> symmetric_axis(std::size_t n, double extent) {
  std::vector<double> axis(n);
  const double step = 2.0 * extent / static_cast<double>(n - 1);
  const double centre = 0.5 * static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) axis[k] = (static_cast<double>(k) - centre) * step;
  return axis;
}

// Maps the sheared lattice (Wp, x) onto (Ws, Wi) for a crystal.
struct ShearMap {
  double ws_per_pump, ws_per_x, wi_per_pump, wi_per_x, jacobian;

  explicit ShearMap(const CrystalParams& c) {
    const double D = c.D();
    const double DL = D * c.length();
    ws_per_pump = 0.5 - c.D_plus() / D;
    wi_per_pump = 0.5 + c.D_plus() / D;
    ws_per_x = 2.0 / DL;
    wi_per_x = -2.0 / DL;
    jacobian = 2.0 / std::abs(DL);  // dWs dWi = jacobian dWp dx
  }
};

// Sampling of the sinc^2 x-integral is alias free while the x-frequency of the
// integrand, plus the sinc^2 band [-2, 2], stays below pi / step.
std::size_t mismatch_nodes_for(const CoherenceQuadrature& q, double max_x_frequency) {
  const double step = std::min(q.mismatch_step, 2.0 * units::pi / (max_x_frequency + 4.5));
  const auto half = static_cast<std::size_t>(std::ceil(q.mismatch_extent / step));
  return 2 * half + 1;
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = w * n / workers; k < (w + 1) * n / workers; ++k) body(k);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

CoherenceIntegrator::CoherenceIntegrator(const CrystalParams& crystal, const PumpPulse& pump,
                                         const InterferometerGeometry& base,
                                         const SampleModel& sample,
                                         const CoherenceQuadrature& q, double delta_z_reach)
    : crystal_(crystal.sigma() > 0.0 ? crystal : CrystalParams([&] {
        // g1 does not depend on sigma; keep the normalization finite.
        CrystalFields f = crystal.fields();
        f.sigma = 1.0;
        return f;
      }())),
      base_(base) {
  base.validate();
  // Lattice phases are referenced to delta_z = 0; z3 of the given geometry
  // is irrelevant.
  base_ = geometry_at_delta_z(base, crystal_, 0.0);
  delta_z_reach = std::abs(delta_z_reach);
  if (q.pump_nodes < 3 || !(q.pump_extent > 0.0) || !(q.mismatch_extent > 0.0) ||
      !(q.mismatch_step > 0.0))
    fail(ErrorKind::Resolution, "coherence quadrature settings must be positive");

  const CrystalParams& c = crystal_;
  const ShearMap map(c);
  const double T0 = pump.T0();
  const double tau = sample.max_delay_fs();

  // Phase slopes of the integrand along Ws and Wi over the scan.
  const Timing t_base = timing_from_geometry(base_, c);
  const double reach_T1 = delta_z_reach / c_mm_per_fs;
  const double slope_s = reach_T1 + std::abs(t_base.T2) + tau;
  const double slope_i = std::abs(t_base.T2) + tau;

  const double max_pump_freq =
      slope_s * std::abs(map.ws_per_pump) + slope_i * std::abs(map.wi_per_pump);
  const double extent = q.pump_extent / T0;
  const double needed = 2.0 * extent * (max_pump_freq + 11.0 * T0) / (2.0 * units::pi) + 1.0;
  const auto pump_n = std::max(q.pump_nodes, static_cast<std::size_t>(std::ceil(needed)) | 1u);
  if (pump_n > kMaxPumpNodes)
    fail(ErrorKind::Resolution, "coherence lattice would need " + std::to_string(pump_n) +
                                    " pump nodes; reduce the scan reach or |T2|");
  pump_axis_ = symmetric_axis(pump_n, extent);

  const double max_x_freq = (slope_s + slope_i) * std::abs(map.ws_per_x);
  x_axis_ = symmetric_axis(mismatch_nodes_for(q, max_x_freq), q.mismatch_extent);
  if (pump_axis_.size() * x_axis_.size() > kMaxLatticeNodes)
    fail(ErrorKind::Resolution, "coherence lattice of " + std::to_string(pump_axis_.size()) + "x" +
                                    std::to_string(x_axis_.size()) + " nodes is too large");

  const auto wp = trapezoid_weights(pump_axis_.size(), pump_axis_[1] - pump_axis_[0]);
  const auto wx = trapezoid_weights(x_axis_.size(), x_axis_[1] - x_axis_[0]);

  ws_per_pump_ = map.ws_per_pump;
  ws_per_x_ = map.ws_per_x;

  const double ks0_air = c.omega_s0() / c_mm_per_fs;
  const double ki0_air = c.omega_i0() / c_mm_per_fs;
  const double kp0_air = c.omega_p0() / c_mm_per_fs;
  const double ki0_crystal = c.idler_phase_index() * ki0_air;
  const double L = c.length();
  const InterferometerGeometry& g = base_;

  weights_.resize(pump_axis_.size() * x_axis_.size());
  for (std::size_t p = 0; p < pump_axis_.size(); ++p) {
    const double omega_p = pump_axis_[p];
    for (std::size_t j = 0; j < x_axis_.size(); ++j) {
      const double x = x_axis_[j];
      const double ws = map.ws_per_pump * omega_p + map.ws_per_x * x;
      const double wi = map.wi_per_pump * omega_p + map.wi_per_x * x;

      // Both crystals produce the same kernel; their pump paths differ.
      const cplx v = biphoton_exact(c, pump, ws, wi);
      const double phase = (kp0_air + omega_p / c_mm_per_fs) * (g.zp2 - g.zp1)  // pump paths
                           - (ki0_air + wi / c_mm_per_fs) * g.z2                // idler to sample
                           - (ki0_crystal + c.N_i() * wi) * L                   // idler through crystal 2
                           + (ks0_air + ws / c_mm_per_fs) * (g.z3 - g.z1);      // signal paths
      const cplx r_conj = std::conj(sample_reflectivity(sample, wi));
      weights_[p * x_axis_.size() + j] =
          std::conj(v) * v * r_conj * std::polar(1.0, phase) * (wp[p] * wx[j] * map.jacobian);
    }
  }
  normalization_ = photon_number(c);
}

cplx CoherenceIntegrator::g1_at_z3(double z3) const {
  const double delta = z3 - base_.z3;
  const double k = delta / c_mm_per_fs;
  const std::size_t nx = x_axis_.size();

  std::vector<cplx> x_phase(nx);
  for (std::size_t j = 0; j < nx; ++j) x_phase[j] = std::polar(1.0, ws_per_x_ * x_axis_[j] * k);

  cplx total{0.0, 0.0};
  for (std::size_t p = 0; p < pump_axis_.size(); ++p) {
    const cplx* row = &weights_[p * nx];
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < nx; ++j) acc += row[j] * x_phase[j];
    total += acc * std::polar(1.0, ws_per_pump_ * pump_axis_[p] * k);
  }
  const cplx g1 = total * std::polar(1.0, crystal_.omega_s0() * k) / normalization_;
  if (!(std::abs(g1) <= 1.0 + 1e-6))
    fail(ErrorKind::Numerical, "|g1| = " + std::to_string(std::abs(g1)) +
                                   " exceeds 1; the coherence lattice is under-resolved");
  return g1;
}

cplx CoherenceIntegrator::g1_at_delta_z(double delta_z_mm) const {
  return g1_at_z3(geometry_at_delta_z(base_, crystal_, delta_z_mm).z3);
}

std::vector<cplx> CoherenceIntegrator::scan_delta_z(std::span<const double> delta_z_mm) const {
  std::vector<cplx> out(delta_z_mm.size());
  parallel_for(delta_z_mm.size(), [&](std::size_t k) { out[k] = g1_at_delta_z(delta_z_mm[k]); });
  return out;
}

cplx g1_numeric(const CrystalParams& crystal, const PumpPulse& pump,
                const InterferometerGeometry& geometry, const SampleModel& sample,
                const CoherenceQuadrature& quadrature) {
  const double reach = std::abs(timing_from_geometry(geometry, crystal).delta_z);
  const CoherenceIntegrator integrator(crystal, pump, geometry, sample, quadrature, reach);
  return integrator.g1_at_z3(geometry.z3);
}

double photon_number_numeric(const CrystalParams& crystal, const PumpPulse& pump,
                             const CoherenceQuadrature& q) {
  const ShearMap map(crystal);
  const auto pump_axis = symmetric_axis(q.pump_nodes, q.pump_extent / pump.T0());
  const auto x_axis = symmetric_axis(mismatch_nodes_for(q, 0.0), q.mismatch_extent);
  const auto wp = trapezoid_weights(pump_axis.size(), pump_axis[1] - pump_axis[0]);
  const auto wx = trapezoid_weights(x_axis.size(), x_axis[1] - x_axis[0]);

  double total = 0.0;
  for (std::size_t p = 0; p < pump_axis.size(); ++p) {
    double row = 0.0;
    for (std::size_t j = 0; j < x_axis.size(); ++j) {
      const double ws = map.ws_per_pump * pump_axis[p] + map.ws_per_x * x_axis[j];
      const double wi = map.wi_per_pump * pump_axis[p] + map.wi_per_x * x_axis[j];
      row += wx[j] * std::norm(biphoton_exact(crystal, pump, ws, wi));
    }
    total += wp[p] * row;
  }
  return total * map.jacobian;
}

}  // namespace nlint
