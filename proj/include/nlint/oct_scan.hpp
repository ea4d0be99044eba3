#pragma once

#include <cstddef>
#include <vector>

#include "nlint/coherence.hpp"
#include "nlint/optics_model.hpp"

namespace nlint {

/// Uniform delta_z sweep (mm). Scans move z3 only.
struct DeltaZScan {
  double start_mm = 0.0;
  double stop_mm = 0.0;
  std::size_t points = 0;

  static DeltaZScan with_step(double start_mm, double stop_mm, double step_mm);
  std::vector<double> values() const;
  double reach() const noexcept;
};

/// Sweep covering the correlation envelope of every reflecting layer, with a
/// 25 % margin. fringe_step_mm > 0 samples at that step; otherwise `points`
/// samples are spread over the range.
DeltaZScan auto_scan(const CrystalParams& crystal, const PumpPulse& pump,
                     const SampleModel& sample, double fringe_step_mm, std::size_t points = 201);

struct Interferogram {
  std::vector<double> delta_z;    // mm
  std::vector<double> flux_norm;  // N / N_s1
  std::vector<double> envelope;   // fringe amplitude, in units of N_s1
  double ns1 = 0.0;               // photons per pulse

  std::vector<double> flux() const;
};

struct PeakReport {
  std::vector<double> positions_mm;
  std::vector<double> separations_um;
  std::vector<double> fwhm_um;  // NaN where a half-height crossing is masked by a neighbour
  bool resolved = false;
};

/// Closed-form detected flux for a two-interface sample with the pump paths
/// synchronized (T2 = 0). The envelope is the sum of per-layer |g1| amplitudes.
Interferogram interferogram_bilayer(const CrystalParams& crystal, const PumpPulse& pump,
                                    const InterferometerGeometry& geometry,
                                    const BilayerSample& sample, const DeltaZScan& scan);

/// Flux from the numerical overlap integral with the full r(Wi); the envelope
/// is the coherent magnitude |g1|.
Interferogram interferogram_numeric(const CrystalParams& crystal, const PumpPulse& pump,
                                    const InterferometerGeometry& geometry,
                                    const SampleModel& sample, const DeltaZScan& scan,
                                    const CoherenceQuadrature& quadrature = {});

/// Peaks of the envelope above 10 % of its maximum, ascending in delta_z.
/// Two adjacent peaks count as resolved when the envelope between them dips
/// by at least half of the lower peak.
PeakReport envelope_peaks(const Interferogram& ifg);

/// (D + 2 D_plus) / (D - 2 D_plus): where the second-layer peak lands, in
/// units of the layer delay, once the Gaussian pump term dominates.
double predicted_peak_shift(const CrystalParams& crystal);

/// Envelope FWHM (um) of the strongest peak; meant for single-layer samples.
double axial_resolution(const Interferogram& ifg);

/// Half the peak-to-peak flux over a sliding window of one fringe period.
std::vector<double> fringe_envelope(const Interferogram& ifg, double fringe_period_mm);

}  // namespace nlint
