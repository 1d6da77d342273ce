#ifndef FCSPDC_SPECTRA_HPP
#define FCSPDC_SPECTRA_HPP

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "fcspdc/phasematch.hpp"

namespace fcspdc {

/// Uniform two-axis angular-frequency window. Axis 1 indexes rows of the
/// amplitude matrices. All frequencies in rad/fs.
struct SpectralGrid {
  double center1 = 0.0, center2 = 0.0;
  double half1 = 0.0, half2 = 0.0;
  int points = 512;

  double step1() const { return 2.0 * half1 / (points - 1); }
  double step2() const { return 2.0 * half2 / (points - 1); }
  double axis1(int i) const { return center1 - half1 + i * step1(); }
  double axis2(int j) const { return center2 - half2 + j * step2(); }

  bool axis1_equals(double center, double half, int n) const;
  bool square_symmetric() const;  // same axis on both dimensions

  void validate() const;  // throws InvalidArgument on bad shape
};

enum class AmplitudeKind { Factor, Jsa, Jca, Effective };

/// Complex amplitude sampled on a SpectralGrid (axis 1 = rows). The model is
/// phase flat, so imaginary parts stay zero, but storage remains complex for
/// future chirp terms.
struct JointAmplitude {
  SpectralGrid grid;
  Eigen::MatrixXcd values;
  AmplitudeKind kind = AmplitudeKind::Factor;
  std::string normalization;

  double squared_norm() const;           // sum |f|^2 (no quadrature weight)
  double weighted_squared_norm() const;  // sum |f|^2 step1 step2
};

enum class PmfKind { Sinc, Gaussian };
const char* to_string(PmfKind k);
PmfKind pmf_kind_from_string(const std::string& s);

/// Central-frequency geometry of one process leg: axis centers, signed QPM
/// grating, and the gradient of the phase mismatch with respect to the two
/// grid axes. For SPDC the axes are (w_s, w_i); for SFC they are (w_i, w_fc).
struct LegGeometry {
  Crystal crystal;
  PhaseMatchConfig config;
  ProcessLeg leg;
  double center1 = 0.0, center2 = 0.0;
  double grad1 = 0.0, grad2 = 0.0;
  PolingSolution grating;

  double gradient_norm() const;
  double mismatch(const CrystalDispersion& d, double w1, double w2) const;
};

LegGeometry spdc_geometry(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                          const FrequencyRelations& rel);
LegGeometry sfc_geometry(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                         const FrequencyRelations& rel);

/// Ridge-normal spectral bandwidth (rad/fs) of the PMF produced by a poling
/// region of the given length, and its inverse.
double pmf_sigma_from_length(const LegGeometry& geom, double length_um, PmfKind kind);
double length_from_pmf_sigma(const LegGeometry& geom, double sigma_rad_fs, PmfKind kind);

// --- amplitude construction -------------------------------------------------

/// alpha(w1 + w2) = exp(-(w1 + w2 - w_pump)^2 / (2 sigma^2)); peak 1 on the
/// energy-conservation antidiagonal.
JointAmplitude pump_envelope(const SpectralGrid& grid, double sigma_p, double omega_p_center);

/// beta(w2 - w1) = exp(-(w2 - w1 - w_escort)^2 / (2 sigma^2)); diagonal
/// level sets, orthogonal to alpha everywhere.
JointAmplitude escort_envelope(const SpectralGrid& grid, double sigma_e, double omega_e_center);

/// Phi = sinc(dk L / 2) with dk evaluated exactly on the grid.
JointAmplitude pmf_sinc(const CrystalDispersion& crystal, const SpectralGrid& grid,
                        const LegGeometry& geom, double length_um);

/// Gaussian ridge profile exp(-dk^2/(2 s^2)) with s chosen so the requested
/// ridge-normal spectral bandwidth is realized.
JointAmplitude pmf_gaussian(const CrystalDispersion& crystal, const SpectralGrid& grid,
                            const LegGeometry& geom, double sigma_rad_fs);

/// Elementwise product alpha * Phi.
JointAmplitude jsa(const JointAmplitude& envelope, const JointAmplitude& pmf);

/// Elementwise product beta * Psi, rescaled so the top singular value of the
/// quadrature-weighted kernel equals one (unit peak conversion).
JointAmplitude jca(const JointAmplitude& envelope, const JointAmplitude& pmf);

/// Kernel contraction over the shared idler axis:
/// f_eff(w_s, w_fc) = sum_i f_jsa(w_s, w_i) f_jca(w_i, w_fc) dw_i.
JointAmplitude effective_jsa(const JointAmplitude& f_jca, const JointAmplitude& f_jsa);

/// Rectangular top-hat passband given per axis in nm; amplitude zeroed
/// outside. Throws EmptyBand when a band misses the grid entirely.
struct WavelengthBand {
  double lo_nm = 0.0;
  double hi_nm = 0.0;
};
JointAmplitude apply_tophat_filter(const JointAmplitude& f, const WavelengthBand& band_axis1,
                                   const WavelengthBand& band_axis2);

// --- grid planning ----------------------------------------------------------

struct FcBandwidths {
  double sigma_p = 0.0;    // pump envelope, rad/fs
  double sigma_e = 0.0;    // escort envelope, rad/fs
  double sigma_phi = 0.0;  // SPDC PMF ridge-normal, rad/fs
  double sigma_psi = 0.0;  // SFC PMF ridge-normal, rad/fs
};

struct FcGrids {
  SpectralGrid jsa_grid;  // (w_s, w_i)
  SpectralGrid jca_grid;  // (w_i, w_fc)
};

/// Windows sized from the exact Gaussian covariance of each leg (5 marginal
/// sigma by default, sinc lobes widened, capped at 20% of the axis center so
/// every sample stays at physical frequencies). Output axes (w_s and w_fc)
/// share center and width so the effective JSA lives on a symmetric grid.
FcGrids plan_fc_grids(const LegGeometry& spdc, const LegGeometry& sfc, const FcBandwidths& bw,
                      PmfKind kind, int points, double n_sigma = 5.0);

/// Symmetric square grid for a degenerate pair (signal and idler both at the
/// degeneracy wavelength).
SpectralGrid plan_degenerate_grid(const LegGeometry& spdc, double sigma_p, double sigma_phi,
                                  PmfKind kind, int points, double n_sigma = 5.0);

/// Assembled FC-SPDC amplitudes for one operating point.
struct FcAmplitudes {
  JointAmplitude f_jsa;
  JointAmplitude f_jca;
  JointAmplitude f_eff;
};
FcAmplitudes build_fc_amplitudes(const CrystalDispersion& crystal, const LegGeometry& spdc,
                                 const LegGeometry& sfc, const FcBandwidths& bw, PmfKind kind,
                                 int points);

/// Degenerate-pair JSA used by the conventional-source comparisons.
JointAmplitude build_degenerate_jsa(const CrystalDispersion& crystal, const LegGeometry& spdc,
                                    double sigma_p, double sigma_phi, PmfKind kind, int points);

}  // namespace fcspdc

#endif
