#pragma once

#include <numbers>

// Internal units: time in fs, length in mm, angular frequency in rad/fs.
namespace nlint::units {

inline constexpr double pi = std::numbers::pi;

inline constexpr double c_mm_per_fs = 2.99792458e-4;
inline constexpr double c_um_per_fs = 2.99792458e-1;
inline constexpr double c_nm_per_fs = 2.99792458e2;

inline constexpr double fs_per_ps = 1e3;
inline constexpr double mm_per_um = 1e-3;
inline constexpr double um_per_mm = 1e3;

constexpr double omega_from_wavelength_nm(double lambda_nm) {
  return 2.0 * pi * c_nm_per_fs / lambda_nm;
}

// Width in wavelength of a small angular-frequency interval about lambda_nm.
constexpr double wavelength_width_nm(double lambda_nm, double d_omega) {
  return lambda_nm * lambda_nm * d_omega / (2.0 * pi * c_nm_per_fs);
}

}  // namespace nlint::units
