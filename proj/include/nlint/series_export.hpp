#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlint/biphoton.hpp"
#include "nlint/oct_scan.hpp"

namespace nlint {

enum class Format { Csv, Json };

std::string to_string(Format format);
Format parse_format(std::string_view text);

/// Numbers as written to every export: 9 significant digits.
std::string format_number(double value);

/// Named columns of equal length, written in declaration order.
struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // one vector per column

  std::size_t rows() const;
};

/// CSV: header row then one line per sample (an empty series is header only).
/// JSON: an object mapping each column name to its array.
void export_series(std::ostream& out, const Series& series, Format format);

Series g1_series(std::span<const double> delta_z_mm, std::span<const cplx> g1);
Series interferogram_series(const Interferogram& ifg);
Series spectrum_series(const MarginalSpectrum& spectrum, double lambda_s0_nm);

/// CSV: top-left cell "omega_s\\omega_i", first row the Wi axis, first column
/// the Ws axis, cells |Phi|^2. JSON: {omega_s, omega_i, intensity[row][col]}.
void export_joint_spectrum(std::ostream& out, const JointSpectrum& js, Format format);

void export_peaks_json(std::ostream& out, const PeakReport& report);
void export_schmidt_json(std::ostream& out, const SchmidtReport& report);
void export_spectrum_summary_json(std::ostream& out, const MarginalSpectrum& spectrum);

/// Writes through `body` to `path`; I/O failures raise ErrorKind::Io naming the path.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

}  // namespace nlint
