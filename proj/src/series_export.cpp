#include "nlint/series_export.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "json.hpp"

#include "nlint/errors.hpp"
#include "nlint/units.hpp"

namespace nlint {

using ordered_json = nlohmann::ordered_json;

std::string to_string(Format format) { return format == Format::Csv ? "csv" : "json"; }

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  fail(ErrorKind::Validation, "output format must be csv or json, got '" + std::string(text) + "'");
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

namespace {

std::string json_number(double value) {
  return std::isfinite(value) ? format_number(value) : "null";
}

// Rounded to the export precision, so JSON reports match the CSV digits.
ordered_json rounded(double value) {
  if (!std::isfinite(value)) return nullptr;
  return std::strtod(format_number(value).c_str(), nullptr);
}

ordered_json rounded(const std::vector<double>& values) {
  ordered_json out = ordered_json::array();
  for (double v : values) out.push_back(rounded(v));
  return out;
}

void json_array(std::ostream& out, std::span<const double> values) {
  out << '[';
  for (std::size_t k = 0; k < values.size(); ++k) out << (k ? "," : "") << json_number(values[k]);
  out << ']';
}

}  // namespace

std::size_t Series::rows() const { return values.empty() ? 0 : values.front().size(); }

void export_series(std::ostream& out, const Series& series, Format format) {
  if (series.columns.size() != series.values.size())
    fail(ErrorKind::Precondition, "series has mismatched column names and data");
  for (const auto& column : series.values)
    if (column.size() != series.rows()) fail(ErrorKind::Precondition, "series columns differ in length");

  if (format == Format::Csv) {
    for (std::size_t c = 0; c < series.columns.size(); ++c) out << (c ? "," : "") << series.columns[c];
    out << '\n';
    for (std::size_t r = 0; r < series.rows(); ++r) {
      for (std::size_t c = 0; c < series.values.size(); ++c)
        out << (c ? "," : "") << format_number(series.values[c][r]);
      out << '\n';
    }
    return;
  }
  out << '{';
  for (std::size_t c = 0; c < series.columns.size(); ++c) {
    out << (c ? "," : "") << '\n' << ordered_json(series.columns[c]).dump() << ':';
    json_array(out, series.values[c]);
  }
  out << "\n}\n";
}

Series g1_series(std::span<const double> delta_z_mm, std::span<const cplx> g1) {
  if (delta_z_mm.size() != g1.size()) fail(ErrorKind::Precondition, "g1 scan length mismatch");
  Series s{{"delta_z_mm", "g1_abs", "g1_phase"}, {{delta_z_mm.begin(), delta_z_mm.end()}, {}, {}}};
  for (const cplx& v : g1) {
    s.values[1].push_back(std::abs(v));
    s.values[2].push_back(std::arg(v));
  }
  return s;
}

Series interferogram_series(const Interferogram& ifg) {
  return Series{{"delta_z_mm", "flux_norm", "envelope"}, {ifg.delta_z, ifg.flux_norm, ifg.envelope}};
}

Series spectrum_series(const MarginalSpectrum& spectrum, double lambda_s0_nm) {
  Series s{{"omega_s_rad_per_fs", "wavelength_nm", "density"}, {spectrum.omega_s, {}, spectrum.density}};
  const double omega0 = units::omega_from_wavelength_nm(lambda_s0_nm);
  for (double w : spectrum.omega_s)
    s.values[1].push_back(2.0 * units::pi * units::c_nm_per_fs / (omega0 + w));
  return s;
}

void export_joint_spectrum(std::ostream& out, const JointSpectrum& js, Format format) {
  const auto axis = js.grid.omega_s_axis();
  const auto n = static_cast<Eigen::Index>(axis.size());
  if (format == Format::Csv) {
    out << "omega_s\\omega_i";
    for (double w : js.grid.omega_i_axis()) out << ',' << format_number(w);
    out << '\n';
    for (Eigen::Index s = 0; s < n; ++s) {
      out << format_number(axis[static_cast<std::size_t>(s)]);
      for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_number(js.intensity(s, i));
      out << '\n';
    }
    return;
  }
  out << "{\n\"omega_s\":";
  json_array(out, axis);
  out << ",\n\"omega_i\":";
  json_array(out, js.grid.omega_i_axis());
  out << ",\n\"intensity\":[";
  std::vector<double> row(axis.size());
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index i = 0; i < n; ++i) row[static_cast<std::size_t>(i)] = js.intensity(s, i);
    out << (s ? ",\n" : "\n");
    json_array(out, row);
  }
  out << "]\n}\n";
}

void export_peaks_json(std::ostream& out, const PeakReport& report) {
  ordered_json j;
  j["positions_mm"] = rounded(report.positions_mm);
  j["separations_um"] = rounded(report.separations_um);
  j["fwhm_um"] = rounded(report.fwhm_um);
  j["resolved"] = report.resolved;
  out << j.dump(2) << '\n';
}

void export_schmidt_json(std::ostream& out, const SchmidtReport& report) {
  ordered_json j;
  j["schmidt_number"] = rounded(report.schmidt_number);
  j["entropy_bits"] = rounded(report.entropy_bits);
  j["singular_ratio"] = rounded(report.singular_ratio);
  j["coefficients"] = rounded(report.coefficients);
  out << j.dump(2) << '\n';
}

void export_spectrum_summary_json(std::ostream& out, const MarginalSpectrum& spectrum) {
  ordered_json j;
  j["peak_omega_rad_per_fs"] = rounded(spectrum.peak_omega);
  j["fwhm_rad_per_fs"] = rounded(spectrum.fwhm_rad_per_fs);
  j["fwhm_nm"] = rounded(spectrum.fwhm_nm);
  out << j.dump(2) << '\n';
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  body(out);
  out.flush();
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace nlint
