#pragma once

#include <complex>
#include <span>
#include <vector>

#include "nlint/optics_model.hpp"

namespace nlint {

struct Timing {
  double T1 = 0.0;       // fs
  double T2 = 0.0;       // fs
  double delta_z = 0.0;  // mm, c * T1
};

Timing timing_from_geometry(const InterferometerGeometry& geometry, const CrystalParams& crystal);

/// Sets zp2 = zp1 + c N_i L + z2 so the idler reaches crystal 2 together with
/// its pump pulse (T2 = 0).
InterferometerGeometry synchronize_pump_path(const InterferometerGeometry& geometry,
                                             const CrystalParams& crystal);

/// Geometry whose z3 puts the scan at the requested delta_z (mm).
InterferometerGeometry geometry_at_delta_z(const InterferometerGeometry& geometry,
                                           const CrystalParams& crystal, double delta_z_mm);

/// Triangle 1 - |x| on [-1, 1], zero outside.
double tri(double x) noexcept;

/// Closed-form |g1| for a lossless idler path and first-order dispersion.
double g1_analytic(const Timing& timing, const CrystalParams& crystal, const PumpPulse& pump) noexcept;

/// N_s = 2 pi sigma^2 L / |D| signal photons per pulse.
double photon_number(const CrystalParams& crystal);

/// Integration lattice for the coherence overlap integral.
///
/// The lattice is sheared along the phase-matching ridge: one axis is the pump
/// detuning Wp = Ws + Wi, the other the sinc argument x = Dk L / 2. Both then
/// have fixed widths (1/T0 and 1) whatever the pulse length, and the sinc^2
/// tails can be followed far enough for 1e-3 accuracy (truncation error is
/// about 1/(pi X) for |x| <= X).
struct CoherenceQuadrature {
  double pump_extent = 7.0;         // |Wp| <= pump_extent / T0
  std::size_t pump_nodes = 257;     // minimum; raised to avoid aliasing
  double mismatch_extent = 1024.0;  // |x| <= X
  double mismatch_step = 0.5;       // maximum step in x

  /// Same extents with half the steps.
  CoherenceQuadrature refined() const;

  bool operator==(const CoherenceQuadrature&) const = default;
};

/// Precomputed overlap integrand for a fixed crystal, pump, sample and base
/// geometry. Only z3 varies between evaluations; the z3 dependence of the
/// integrand is a plane wave in (Wp, x) and is applied per scan point.
class CoherenceIntegrator {
 public:
  /// delta_z_reach (mm) bounds |delta_z| of the scan points that will be
  /// evaluated; it sizes the lattice steps so that no alias of the correlation
  /// peak falls inside the scan. z3 of `base` is ignored.
  CoherenceIntegrator(const CrystalParams& crystal, const PumpPulse& pump,
                      const InterferometerGeometry& base, const SampleModel& sample,
                      const CoherenceQuadrature& quadrature = {}, double delta_z_reach = 0.0);

  /// g1 including the carrier phase, normalized by the analytic photon number.
  /// Throws Numerical if |g1| exceeds 1 + 1e-6.
  cplx g1_at_z3(double z3) const;
  cplx g1_at_delta_z(double delta_z_mm) const;

  /// Evaluates scan points concurrently (see worker_count()).
  std::vector<cplx> scan_delta_z(std::span<const double> delta_z_mm) const;

  std::size_t pump_nodes() const noexcept { return pump_axis_.size(); }
  std::size_t mismatch_nodes() const noexcept { return x_axis_.size(); }

 private:
  CrystalParams crystal_;
  InterferometerGeometry base_;
  std::vector<double> pump_axis_;
  std::vector<double> x_axis_;
  std::vector<cplx> weights_;  // row-major [pump][x], includes quadrature weights
  double normalization_;
  // Ws = ws_per_pump * Wp + ws_per_x * x on the lattice.
  double ws_per_pump_;
  double ws_per_x_;
};

/// Normalized first-order correlation between the two signal beams, by
/// quadrature of the overlap integral with the full r(Wi) in the kernel.
cplx g1_numeric(const CrystalParams& crystal, const PumpPulse& pump,
                const InterferometerGeometry& geometry, const SampleModel& sample,
                const CoherenceQuadrature& quadrature = {});

/// Quadrature of the double integral of |V_s1|^2 over Ws, Wi (photon number
/// oracle for the closed form).
double photon_number_numeric(const CrystalParams& crystal, const PumpPulse& pump,
                             const CoherenceQuadrature& quadrature = {});

/// Worker threads for scan evaluation: NLINT_WORKERS if set, else the
/// hardware concurrency.
unsigned worker_count();

}  // namespace nlint
