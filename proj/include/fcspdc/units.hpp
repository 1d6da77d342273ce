#ifndef FCSPDC_UNITS_HPP
#define FCSPDC_UNITS_HPP

#include <cmath>

// Unit system used throughout: lengths in micrometers (crystal scale) or
// nanometers (wavelengths at API boundaries), time in femtoseconds, angular
// frequency in rad/fs, wave numbers in rad/um, inverse group velocity in
// fs/um.

namespace fcspdc::units {

inline constexpr double c_um_per_fs = 0.299792458;
inline constexpr double c_nm_per_fs = 299.792458;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline double omega_from_nm(double lambda_nm) { return two_pi * c_nm_per_fs / lambda_nm; }
inline double nm_from_omega(double omega_rad_fs) { return two_pi * c_nm_per_fs / omega_rad_fs; }

// FWHM of exp(-x^2/(2 sigma^2)) is 2 sqrt(2 ln 2) sigma.
inline constexpr double fwhm_per_sigma = 2.3548200450309493;

inline double sigma_from_fwhm(double fwhm) { return fwhm / fwhm_per_sigma; }
inline double fwhm_from_sigma(double sigma) { return sigma * fwhm_per_sigma; }

// Transform-limited pulse: spectral FWHM (rad/fs) <-> duration FWHM (fs),
// using the 0.44 time-bandwidth product.
inline constexpr double time_bandwidth_product = 0.44;

inline double pulse_duration_from_sigma(double sigma_rad_fs) {
  return time_bandwidth_product / fwhm_from_sigma(sigma_rad_fs);
}
inline double sigma_from_pulse_duration(double dt_fs) {
  return sigma_from_fwhm(time_bandwidth_product / dt_fs);
}

// Gaussian-equivalent width of sinc(x): exp(-0.193 x^2) matches the FWHM of
// sinc^2. Amplitude standard deviation in x units:
inline const double sinc_gaussian_sigma_x = 1.0 / std::sqrt(2.0 * 0.193);

}  // namespace fcspdc::units

#endif
