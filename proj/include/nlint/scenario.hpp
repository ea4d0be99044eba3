#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nlint/coherence.hpp"
#include "nlint/optics_model.hpp"
#include "nlint/series_export.hpp"

namespace nlint {

enum class Task { JointSpectrum, Schmidt, G1Scan, OctScan, Spectrum };

std::string to_string(Task task);
Task parse_task(std::string_view name);

enum class SampleKind { Mirror, Uniform, Bilayer, Tabulated };

/// Sample as declared in a scenario, kept in explicit form so it can be
/// rendered back. Fresnel inputs are resolved to r0 and r1 while parsing.
struct SampleSpec {
  SampleKind kind = SampleKind::Mirror;
  cplx r{1.0, 0.0};     // uniform
  BilayerSample layers;  // bilayer
  TabulatedSample table;

  SampleModel model() const;
  bool operator==(const SampleSpec&) const = default;
};

struct ScanSpec {
  bool automatic = true;
  double start_mm = 0.0;  // explicit range only
  double stop_mm = 0.0;
  std::size_t points = 201;
  bool fringes = false;  // sample at lambda_s0 / 8 instead of `points`

  bool operator==(const ScanSpec&) const = default;
};

struct GridSpec {
  std::size_t points = 1024;
  Kernel kernel = Kernel::Exact;
  CoherenceQuadrature quadrature;

  bool operator==(const GridSpec&) const = default;
};

struct OutputSpec {
  std::string dir = "out";
  Format format = Format::Csv;
  std::string prefix;

  bool operator==(const OutputSpec&) const = default;
};

/// A fully resolved simulation recipe. Geometry already has the pump path
/// synchronized when `synchronize` is set, and z3 is the delta_z = 0 position.
struct Scenario {
  CrystalFields crystal;
  double T0_fs = 0.0;
  InterferometerGeometry geometry;
  bool synchronize = true;
  SampleSpec sample;
  ScanSpec scan;
  GridSpec grid;
  std::vector<Task> tasks;
  OutputSpec output;

  bool operator==(const Scenario&) const = default;
};

/// Parses the sectioned key = value format described in the README.
/// Syntax errors carry the line number, unknown keys are rejected, and
/// invariant violations name the offending field.
Scenario parse_scenario(std::string_view text);

/// Canonical text with every value explicit; parse_scenario(render_scenario(s)) == s.
std::string render_scenario(const Scenario& scenario);

struct PresetInfo {
  std::string name;
  std::string section;
  std::string description;
};

std::vector<PresetInfo> list_presets();

}  // namespace nlint
