#include "nlint/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "nlint/biphoton.hpp"
#include "nlint/coherence.hpp"
#include "nlint/errors.hpp"
#include "nlint/oct_scan.hpp"
#include "nlint/series_export.hpp"

namespace nlint {

namespace fs = std::filesystem;

namespace {

// Scan points re-evaluated on the refined coherence lattice.
constexpr std::size_t kConvergenceProbes = 21;

std::string file_stem(const OutputSpec& out, const std::string& name) {
  return out.prefix.empty() ? name : out.prefix + "_" + name;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read back " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ConvergenceCheck compare(std::string quantity, double coarse, double fine, double scale) {
  ConvergenceCheck c;
  c.quantity = std::move(quantity);
  c.applicable = true;
  c.coarse = coarse;
  c.fine = fine;
  c.relative_change = std::abs(fine - coarse) / scale;
  c.flagged = !(c.relative_change <= kConvergenceTolerance);
  return c;
}

ConvergenceCheck not_applicable(std::string quantity, std::string note) {
  ConvergenceCheck c;
  c.quantity = std::move(quantity);
  c.note = std::move(note);
  return c;
}

class TaskRunner {
 public:
  TaskRunner(const Scenario& sc, std::vector<fs::path>& written)
      : sc_(sc),
        crystal_(sc.crystal),
        pump_(sc.T0_fs),
        sample_(sc.sample.model()),
        written_(written) {}

  void run(Task task, TaskRecord& record) {
    record_ = &record;
    switch (task) {
      case Task::JointSpectrum: joint_spectrum(); break;
      case Task::Spectrum: spectrum(); break;
      case Task::Schmidt: schmidt(); break;
      case Task::G1Scan: g1_scan(); break;
      case Task::OctScan: oct_scan(); break;
    }
  }

 private:
  std::string ext() const { return sc_.output.format == Format::Csv ? ".csv" : ".json"; }

  fs::path emit(const std::string& stem, const std::string& extension,
                const std::function<void(std::ostream&)>& body) {
    const fs::path path = fs::path(sc_.output.dir) / (file_stem(sc_.output, stem) + extension);
    written_.push_back(path);
    write_file(path, body);
    record_->files.push_back(path);
    return path;
  }

  // Marginal FWHM at n and 2n grid points.
  ConvergenceCheck marginal_convergence(const MarginalSpectrum& coarse) {
    try {
      const auto fine_grid = make_frequency_grid(crystal_, pump_, 2 * sc_.grid.points, sc_.grid.kernel);
      const auto fine = marginal_spectrum_streamed(sc_.grid.kernel, crystal_, pump_, fine_grid);
      return compare("marginal_fwhm_rad_per_fs", coarse.fwhm_rad_per_fs, fine.fwhm_rad_per_fs,
                     std::abs(fine.fwhm_rad_per_fs));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Resolution) throw;
      return not_applicable("marginal_fwhm_rad_per_fs", e.what());
    }
  }

  void joint_spectrum() {
    const auto grid = make_frequency_grid(crystal_, pump_, sc_.grid.points, sc_.grid.kernel);
    const JointSpectrum js = joint_spectral_intensity(sc_.grid.kernel, crystal_, pump_, grid);
    emit("joint_spectrum", ext(), [&](std::ostream& o) { export_joint_spectrum(o, js, sc_.output.format); });
    record_->convergence = marginal_convergence(marginal_spectrum(js, crystal_));
  }

  void spectrum() {
    const auto grid = make_frequency_grid(crystal_, pump_, sc_.grid.points, sc_.grid.kernel);
    const MarginalSpectrum m = marginal_spectrum_streamed(sc_.grid.kernel, crystal_, pump_, grid);
    emit("spectrum", ext(), [&](std::ostream& o) {
      export_series(o, spectrum_series(m, crystal_.lambda_s0_nm()), sc_.output.format);
    });
    emit("spectrum_summary", ".json", [&](std::ostream& o) { export_spectrum_summary_json(o, m); });
    record_->convergence = marginal_convergence(m);
  }

  void schmidt() {
    const auto grid = make_frequency_grid(crystal_, pump_, sc_.grid.points, sc_.grid.kernel);
    const SchmidtReport report =
        schmidt_analysis(joint_spectral_intensity(sc_.grid.kernel, crystal_, pump_, grid));
    emit("schmidt", ".json", [&](std::ostream& o) { export_schmidt_json(o, report); });
    try {
      const auto coarse_grid =
          make_frequency_grid(crystal_, pump_, sc_.grid.points / 2, sc_.grid.kernel);
      const SchmidtReport coarse =
          schmidt_analysis(joint_spectral_intensity(sc_.grid.kernel, crystal_, pump_, coarse_grid));
      record_->convergence = compare("schmidt_number", coarse.schmidt_number, report.schmidt_number,
                                     report.schmidt_number);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Resolution) throw;
      record_->convergence = not_applicable("schmidt_number", e.what());
    }
  }

  DeltaZScan scan() const {
    const double fringe_step = sc_.scan.fringes ? crystal_.lambda_s0_nm() * 1e-6 / 8.0 : 0.0;
    if (sc_.scan.automatic) return auto_scan(crystal_, pump_, sample_, fringe_step, sc_.scan.points);
    if (fringe_step > 0.0) return DeltaZScan::with_step(sc_.scan.start_mm, sc_.scan.stop_mm, fringe_step);
    return DeltaZScan{sc_.scan.start_mm, sc_.scan.stop_mm, sc_.scan.points};
  }

  // Largest change of |g1| between the scenario lattice and the refined one,
  // probed at evenly spaced scan points. |g1| <= 1, so this is relative to the peak.
  ConvergenceCheck g1_convergence(const std::vector<double>& dz, const std::vector<cplx>& g1,
                                  double reach) {
    const CoherenceIntegrator fine(crystal_, pump_, sc_.geometry, sample_,
                                   sc_.grid.quadrature.refined(), reach);
    const std::size_t probes = std::min(kConvergenceProbes, dz.size());
    std::vector<double> points;
    std::vector<std::size_t> index;
    for (std::size_t k = 0; k < probes; ++k) {
      const std::size_t i = probes == 1 ? 0 : k * (dz.size() - 1) / (probes - 1);
      index.push_back(i);
      points.push_back(dz[i]);
    }
    const auto refined = fine.scan_delta_z(points);
    ConvergenceCheck c;
    c.quantity = "max_abs_g1_change";
    c.applicable = true;
    for (std::size_t k = 0; k < probes; ++k) {
      const double change = std::abs(std::abs(refined[k]) - std::abs(g1[index[k]]));
      if (change >= c.relative_change) {
        c.relative_change = change;
        c.coarse = std::abs(g1[index[k]]);
        c.fine = std::abs(refined[k]);
      }
    }
    c.flagged = !(c.relative_change <= kConvergenceTolerance);
    return c;
  }

  void g1_scan() {
    const DeltaZScan s = scan();
    const CoherenceIntegrator integrator(crystal_, pump_, sc_.geometry, sample_,
                                         sc_.grid.quadrature, s.reach());
    const std::vector<double> dz = s.values();
    const std::vector<cplx> g1 = integrator.scan_delta_z(dz);
    emit("g1_scan", ext(), [&](std::ostream& o) { export_series(o, g1_series(dz, g1), sc_.output.format); });
    record_->convergence = g1_convergence(dz, g1, s.reach());
  }

  // Samples with real, frequency-flat echoes have the closed form.
  std::optional<BilayerSample> closed_form_layers() const {
    if (const auto* b = std::get_if<BilayerSample>(&sample_.variant())) return *b;
    if (const auto* u = std::get_if<UniformSample>(&sample_.variant()); u && u->r.imag() == 0.0) {
      BilayerSample b;
      b.r0 = u->r.real();
      b.carrier_omega = crystal_.omega_i0();
      return b;
    }
    return std::nullopt;
  }

  void oct_scan() {
    const DeltaZScan s = scan();
    Interferogram ifg;
    if (const auto layers = closed_form_layers()) {
      ifg = interferogram_bilayer(crystal_, pump_, sc_.geometry, *layers, s);
      record_->convergence = not_applicable("interferogram", "closed form");
    } else {
      const CoherenceIntegrator integrator(crystal_, pump_, sc_.geometry, sample_,
                                           sc_.grid.quadrature, s.reach());
      ifg.delta_z = s.values();
      const std::vector<cplx> g1 = integrator.scan_delta_z(ifg.delta_z);
      for (const cplx& v : g1) {
        ifg.flux_norm.push_back(1.0 + v.imag());
        ifg.envelope.push_back(std::abs(v));
      }
      ifg.ns1 = photon_number(crystal_);
      record_->convergence = g1_convergence(ifg.delta_z, g1, s.reach());
    }
    const PeakReport peaks = envelope_peaks(ifg);
    emit("oct_scan", ext(), [&](std::ostream& o) {
      export_series(o, interferogram_series(ifg), sc_.output.format);
    });
    emit("oct_peaks", ".json", [&](std::ostream& o) { export_peaks_json(o, peaks); });
  }

  const Scenario& sc_;
  CrystalParams crystal_;
  PumpPulse pump_;
  SampleModel sample_;
  std::vector<fs::path>& written_;
  TaskRecord* record_ = nullptr;
};

void write_manifest(const RunManifest& m, const fs::path& path) {
  nlohmann::ordered_json j;
  j["scenario_digest"] = m.scenario_digest;
  j["digest"] = m.digest;
  j["flagged"] = m.flagged();
  j["convergence_tolerance"] = kConvergenceTolerance;
  j["seconds"] = m.seconds;
  j["tasks"] = nlohmann::ordered_json::array();
  for (const TaskRecord& t : m.tasks) {
    nlohmann::ordered_json tj;
    tj["task"] = to_string(t.task);
    tj["files"] = nlohmann::ordered_json::array();
    for (const auto& f : t.files) tj["files"].push_back(f.filename().string());
    tj["seconds"] = t.seconds;
    auto& c = tj["convergence"];
    c["quantity"] = t.convergence.quantity;
    c["applicable"] = t.convergence.applicable;
    if (t.convergence.applicable) {
      c["coarse"] = t.convergence.coarse;
      c["fine"] = t.convergence.fine;
      c["relative_change"] = t.convergence.relative_change;
      c["flagged"] = t.convergence.flagged;
    }
    if (!t.convergence.note.empty()) c["note"] = t.convergence.note;
    j["tasks"].push_back(std::move(tj));
  }
  write_file(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

}  // namespace

bool RunManifest::flagged() const {
  return std::any_of(tasks.begin(), tasks.end(),
                     [](const TaskRecord& t) { return t.convergence.flagged; });
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Numerical:
    case ErrorKind::Analysis:
    case ErrorKind::Resolution:
      return 2;
    default:
      return 1;
  }
}

RunManifest run_scenario(const Scenario& sc) {
  if (sc.tasks.empty()) fail(ErrorKind::Validation, "scenario has no tasks");
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(sc.output.dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + sc.output.dir + ": " + ec.message());

  const std::string rendered = render_scenario(sc);
  RunManifest manifest;
  manifest.scenario_digest = hex(fnv1a(rendered));

  std::vector<fs::path> written;
  TaskRunner runner(sc, written);
  for (Task task : sc.tasks) {
    TaskRecord record{task, {}, 0.0, {}};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      runner.run(task, record);
    } catch (const Error& e) {
      for (const auto& path : written) fs::remove(path, ec);
      fail(e.kind(), "task " + to_string(task) + ": " + e.what());
    } catch (const std::exception& e) {
      for (const auto& path : written) fs::remove(path, ec);
      fail(ErrorKind::Numerical, "task " + to_string(task) + ": " + e.what());
    }
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.tasks.push_back(std::move(record));
  }

  std::uint64_t h = fnv1a(rendered);
  for (const TaskRecord& t : manifest.tasks) {
    for (const auto& f : t.files) {
      h = fnv1a(f.filename().string(), h);
      h = fnv1a(read_bytes(f), h);
    }
  }
  manifest.digest = hex(h);
  manifest.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest.manifest_path = fs::path(sc.output.dir) / (file_stem(sc.output, "manifest") + ".json");
  write_manifest(manifest, manifest.manifest_path);
  return manifest;
}

}  // namespace nlint
