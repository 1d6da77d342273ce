#include "fcspdc/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fcspdc/units.hpp"

namespace fcspdc {

namespace {

constexpr double kAxisTol = 1e-9;

// Window cap as a fraction of the axis center frequency; keeps every grid
// sample at a positive frequency away from the Sellmeier poles even for
// degenerate bandwidth combinations.
constexpr double kWindowCapFraction = 0.2;

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

bool SpectralGrid::axis1_equals(double center, double half, int n) const {
  const double scale = std::max(std::abs(center1), 1.0);
  return std::abs(center1 - center) <= kAxisTol * scale &&
         std::abs(half1 - half) <= kAxisTol * scale && points == n;
}

bool SpectralGrid::square_symmetric() const {
  const double scale = std::max(std::abs(center1), 1.0);
  return std::abs(center1 - center2) <= kAxisTol * scale &&
         std::abs(half1 - half2) <= kAxisTol * scale;
}

void SpectralGrid::validate() const {
  if (points < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least two points");
  if (!(half1 > 0.0) || !(half2 > 0.0))
    throw Error(ErrorKind::InvalidArgument, "grid half-widths must be positive");
  if (!(center1 - half1 > 0.0) || !(center2 - half2 > 0.0))
    throw Error(ErrorKind::InvalidArgument, "grid extends to non-positive frequencies");
}

double JointAmplitude::squared_norm() const { return values.squaredNorm(); }

double JointAmplitude::weighted_squared_norm() const {
  return values.squaredNorm() * grid.step1() * grid.step2();
}

const char* to_string(PmfKind k) { return k == PmfKind::Sinc ? "sinc" : "gaussian"; }

PmfKind pmf_kind_from_string(const std::string& s) {
  if (s == "sinc") return PmfKind::Sinc;
  if (s == "gaussian" || s == "gauss") return PmfKind::Gaussian;
  throw Error(ErrorKind::InvalidArgument, "unknown PMF kind '" + s + "'");
}

double LegGeometry::gradient_norm() const { return std::hypot(grad1, grad2); }

double LegGeometry::mismatch(const CrystalDispersion& d, double w1, double w2) const {
  if (leg == ProcessLeg::Spdc) {
    return d.wave_number_at_omega(config.spdc_pump, w1 + w2) -
           d.wave_number_at_omega(config.spdc_signal, w1) -
           d.wave_number_at_omega(config.spdc_idler, w2) - grating.grating_rad_um();
  }
  return d.wave_number_at_omega(config.sfc_converted, w2) -
         d.wave_number_at_omega(config.sfc_escort, w2 - w1) -
         d.wave_number_at_omega(config.sfc_idler, w1) - grating.grating_rad_um();
}

LegGeometry spdc_geometry(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                          const FrequencyRelations& rel) {
  LegGeometry g;
  g.crystal = crystal.id();
  g.config = config;
  g.leg = ProcessLeg::Spdc;
  g.center1 = rel.omega_signal();
  g.center2 = rel.omega_idler();
  g.grating = solve_spdc_poling(crystal, config, rel);
  const double kp = crystal.inverse_group_velocity_at_omega(config.spdc_pump, rel.omega_pump());
  g.grad1 = kp - crystal.inverse_group_velocity_at_omega(config.spdc_signal, rel.omega_signal());
  g.grad2 = kp - crystal.inverse_group_velocity_at_omega(config.spdc_idler, rel.omega_idler());
  return g;
}

LegGeometry sfc_geometry(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                         const FrequencyRelations& rel) {
  LegGeometry g;
  g.crystal = crystal.id();
  g.config = config;
  g.leg = ProcessLeg::Sfc;
  g.center1 = rel.omega_idler();
  g.center2 = rel.omega_fc();
  g.grating = solve_sfc_poling(crystal, config, rel);
  const double ke = crystal.inverse_group_velocity_at_omega(config.sfc_escort, rel.omega_escort());
  g.grad1 = ke - crystal.inverse_group_velocity_at_omega(config.sfc_idler, rel.omega_idler());
  g.grad2 = crystal.inverse_group_velocity_at_omega(config.sfc_converted, rel.omega_fc()) - ke;
  return g;
}

double pmf_sigma_from_length(const LegGeometry& geom, double length_um, PmfKind) {
  if (!(length_um > 0.0)) throw Error(ErrorKind::InvalidArgument, "length must be positive");
  // Gaussian regions use the width matched to a sinc region of equal length,
  // so the relation is shared by both kinds.
  const double s_dk = 2.0 * units::sinc_gaussian_sigma_x / length_um;
  return s_dk / geom.gradient_norm();
}

double length_from_pmf_sigma(const LegGeometry& geom, double sigma_rad_fs, PmfKind) {
  if (!(sigma_rad_fs > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma must be positive");
  return 2.0 * units::sinc_gaussian_sigma_x / (sigma_rad_fs * geom.gradient_norm());
}

JointAmplitude pump_envelope(const SpectralGrid& grid, double sigma_p, double omega_p_center) {
  if (!(sigma_p > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma_p must be positive");
  grid.validate();
  JointAmplitude out;
  out.grid = grid;
  out.values.resize(grid.points, grid.points);
  for (int i = 0; i < grid.points; ++i) {
    const double w1 = grid.axis1(i);
    for (int j = 0; j < grid.points; ++j) {
      const double d = w1 + grid.axis2(j) - omega_p_center;
      out.values(i, j) = std::exp(-d * d / (2.0 * sigma_p * sigma_p));
    }
  }
  return out;
}

JointAmplitude escort_envelope(const SpectralGrid& grid, double sigma_e, double omega_e_center) {
  if (!(sigma_e > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma_e must be positive");
  grid.validate();
  JointAmplitude out;
  out.grid = grid;
  out.values.resize(grid.points, grid.points);
  for (int i = 0; i < grid.points; ++i) {
    const double w1 = grid.axis1(i);
    for (int j = 0; j < grid.points; ++j) {
      const double d = grid.axis2(j) - w1 - omega_e_center;
      out.values(i, j) = std::exp(-d * d / (2.0 * sigma_e * sigma_e));
    }
  }
  return out;
}

namespace {

JointAmplitude pmf_impl(const CrystalDispersion& crystal, const SpectralGrid& grid,
                        const LegGeometry& geom, PmfKind kind, double sinc_length_um,
                        double gauss_s_dk) {
  grid.validate();
  JointAmplitude out;
  out.grid = grid;
  out.values.resize(grid.points, grid.points);

  // Per-axis wave numbers are one-dimensional; only the pump/escort term
  // couples the axes and needs the full grid.
  Eigen::VectorXd k1(grid.points), k2(grid.points);
  const bool spdc = geom.leg == ProcessLeg::Spdc;
  const Axis a1 = spdc ? geom.config.spdc_signal : geom.config.sfc_idler;
  const Axis a2 = spdc ? geom.config.spdc_idler : geom.config.sfc_converted;
  for (int i = 0; i < grid.points; ++i) k1(i) = crystal.wave_number_at_omega(a1, grid.axis1(i));
  for (int j = 0; j < grid.points; ++j) k2(j) = crystal.wave_number_at_omega(a2, grid.axis2(j));

  const double g = geom.grating.grating_rad_um();
  for (int i = 0; i < grid.points; ++i) {
    const double w1 = grid.axis1(i);
    for (int j = 0; j < grid.points; ++j) {
      const double w2 = grid.axis2(j);
      double dk;
      if (spdc) {
        dk = crystal.wave_number_at_omega(geom.config.spdc_pump, w1 + w2) - k1(i) - k2(j) - g;
      } else {
        dk = k2(j) - crystal.wave_number_at_omega(geom.config.sfc_escort, w2 - w1) - k1(i) - g;
      }
      out.values(i, j) =
          kind == PmfKind::Sinc ? sinc(0.5 * dk * sinc_length_um)
                                : std::exp(-dk * dk / (2.0 * gauss_s_dk * gauss_s_dk));
    }
  }
  return out;
}

}  // namespace

JointAmplitude pmf_sinc(const CrystalDispersion& crystal, const SpectralGrid& grid,
                        const LegGeometry& geom, double length_um) {
  if (!(length_um >= 1000.0 * (1.0 - 1e-6) && length_um <= 30000.0 * (1.0 + 1e-6)))
    throw Error(ErrorKind::InvalidArgument, "region length outside 1-30 mm");
  return pmf_impl(crystal, grid, geom, PmfKind::Sinc, length_um, 0.0);
}

JointAmplitude pmf_gaussian(const CrystalDispersion& crystal, const SpectralGrid& grid,
                            const LegGeometry& geom, double sigma_rad_fs) {
  if (!(sigma_rad_fs > 0.0)) throw Error(ErrorKind::InvalidArgument, "bandwidth must be positive");
  const double s_dk = sigma_rad_fs * geom.gradient_norm();
  return pmf_impl(crystal, grid, geom, PmfKind::Gaussian, 0.0, s_dk);
}

namespace {

void require_same_grid(const JointAmplitude& a, const JointAmplitude& b) {
  const auto& g = a.grid;
  const auto& h = b.grid;
  const double s = std::max(std::abs(g.center1), 1.0);
  if (g.points != h.points || std::abs(g.center1 - h.center1) > kAxisTol * s ||
      std::abs(g.center2 - h.center2) > kAxisTol * s ||
      std::abs(g.half1 - h.half1) > kAxisTol * s || std::abs(g.half2 - h.half2) > kAxisTol * s)
    throw Error(ErrorKind::GridMismatch, "amplitude factors live on different grids");
}

// Largest singular value by power iteration on K^H K; deterministic start.
double top_singular_value(const Eigen::MatrixXcd& m) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(m.cols());
  v.normalize();
  double s = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXcd w = m.adjoint() * (m * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    w /= nw;
    const double s_new = std::sqrt(nw);
    if (std::abs(s_new - s) <= 1e-13 * s_new && it > 3) return s_new;
    s = s_new;
    v.swap(w);
  }
  return s;
}

}  // namespace

JointAmplitude jsa(const JointAmplitude& envelope, const JointAmplitude& pmf) {
  require_same_grid(envelope, pmf);
  JointAmplitude out;
  out.grid = envelope.grid;
  out.values = envelope.values.cwiseProduct(pmf.values);
  out.kind = AmplitudeKind::Jsa;
  return out;
}

JointAmplitude jca(const JointAmplitude& envelope, const JointAmplitude& pmf) {
  require_same_grid(envelope, pmf);
  JointAmplitude out;
  out.grid = envelope.grid;
  out.values = envelope.values.cwiseProduct(pmf.values);
  out.kind = AmplitudeKind::Jca;
  // Unit peak conversion: top singular value of the L2 quadrature-weighted
  // kernel sqrt(dw1 dw2) K equals one, which bounds the conversion
  // efficiency by one.
  const double weight = std::sqrt(out.grid.step1() * out.grid.step2());
  const double s1 = top_singular_value(out.values) * weight;
  if (!(s1 > 0.0)) throw Error(ErrorKind::ZeroAmplitude, "conversion kernel is zero");
  out.values /= s1;
  out.normalization = "peak-kernel-singular-value=1";
  return out;
}

JointAmplitude effective_jsa(const JointAmplitude& f_jca, const JointAmplitude& f_jsa) {
  if (f_jsa.grid.points != f_jca.grid.points)
    throw Error(ErrorKind::GridMismatch, "shared idler axis differs in point count");
  const double s = std::max(std::abs(f_jsa.grid.center2), 1.0);
  if (std::abs(f_jsa.grid.center2 - f_jca.grid.center1) > kAxisTol * s ||
      std::abs(f_jsa.grid.half2 - f_jca.grid.half1) > kAxisTol * s)
    throw Error(ErrorKind::GridMismatch, "shared idler axis differs between JSA and JCA");

  JointAmplitude out;
  out.grid.center1 = f_jsa.grid.center1;
  out.grid.half1 = f_jsa.grid.half1;
  out.grid.center2 = f_jca.grid.center2;
  out.grid.half2 = f_jca.grid.half2;
  out.grid.points = f_jsa.grid.points;
  out.kind = AmplitudeKind::Effective;
  out.normalization = f_jca.normalization;
  out.values.noalias() = f_jsa.values * f_jca.values;
  out.values *= f_jsa.grid.step2();  // quadrature weight of the contracted axis
  return out;
}

JointAmplitude apply_tophat_filter(const JointAmplitude& f, const WavelengthBand& band_axis1,
                                   const WavelengthBand& band_axis2) {
  auto omega_window = [](const WavelengthBand& b) {
    if (!(b.lo_nm > 0.0) || !(b.hi_nm >= b.lo_nm))
      throw Error(ErrorKind::InvalidArgument, "bad filter band");
    return std::pair<double, double>{units::omega_from_nm(b.hi_nm),
                                     units::omega_from_nm(b.lo_nm)};
  };
  const auto [w1_lo, w1_hi] = omega_window(band_axis1);
  const auto [w2_lo, w2_hi] = omega_window(band_axis2);

  const auto& g = f.grid;
  if (w1_hi < g.axis1(0) || w1_lo > g.axis1(g.points - 1) || w2_hi < g.axis2(0) ||
      w2_lo > g.axis2(g.points - 1))
    throw Error(ErrorKind::EmptyBand, "filter band does not overlap the grid");

  JointAmplitude out = f;
  for (int i = 0; i < g.points; ++i) {
    const double w1 = g.axis1(i);
    const bool pass1 = w1 >= w1_lo && w1 <= w1_hi;
    for (int j = 0; j < g.points; ++j) {
      const double w2 = g.axis2(j);
      if (!pass1 || w2 < w2_lo || w2 > w2_hi) out.values(i, j) = 0.0;
    }
  }
  return out;
}

namespace {

struct Window {
  double hw1, hw2;
};

// Half-widths from the exact covariance of the Gaussian model
// exp(-(e.x)^2/(2 se^2) - (g.x)^2/(2 sg^2)).
Window covariance_window(double e1, double e2, double sigma_env, double g1, double g2,
                         double sigma_g, double n_sigma, double c1, double c2) {
  const double a11 = e1 * e1 / (sigma_env * sigma_env) + g1 * g1 / (sigma_g * sigma_g);
  const double a12 = e1 * e2 / (sigma_env * sigma_env) + g1 * g2 / (sigma_g * sigma_g);
  const double a22 = e2 * e2 / (sigma_env * sigma_env) + g2 * g2 / (sigma_g * sigma_g);
  const double reg = (a11 + a22) * 1e-9;
  const double det = (a11 + reg) * (a22 + reg) - a12 * a12;
  const double cov11 = (a22 + reg) / det;
  const double cov22 = (a11 + reg) / det;
  Window w;
  w.hw1 = std::min(n_sigma * std::sqrt(cov11), kWindowCapFraction * c1);
  w.hw2 = std::min(n_sigma * std::sqrt(cov22), kWindowCapFraction * c2);
  return w;
}

// The sinc PMF keeps sidebands out to several lobes; widen its share of the
// window so the fourth zero stays resolved.
double pmf_window_sigma(double sigma, PmfKind kind) {
  return kind == PmfKind::Sinc ? 2.0 * sigma : sigma;
}

}  // namespace

FcGrids plan_fc_grids(const LegGeometry& spdc, const LegGeometry& sfc, const FcBandwidths& bw,
                      PmfKind kind, int points, double n_sigma) {
  if (points < 64) throw Error(ErrorKind::InvalidArgument, "grid needs at least 64 points");
  const double s_phi_dk = pmf_window_sigma(bw.sigma_phi, kind) * spdc.gradient_norm();
  const double s_psi_dk = pmf_window_sigma(bw.sigma_psi, kind) * sfc.gradient_norm();

  const Window wj = covariance_window(1.0, 1.0, bw.sigma_p, spdc.grad1, spdc.grad2, s_phi_dk,
                                      n_sigma, spdc.center1, spdc.center2);
  const Window wc = covariance_window(-1.0, 1.0, bw.sigma_e, sfc.grad1, sfc.grad2, s_psi_dk,
                                      n_sigma, sfc.center1, sfc.center2);

  FcGrids grids;
  const double hw_i = std::max(wj.hw2, wc.hw1);
  const double hw_out = std::max(wj.hw1, wc.hw2);
  grids.jsa_grid = {spdc.center1, spdc.center2, hw_out, hw_i, points};
  grids.jca_grid = {sfc.center1, sfc.center2, hw_i, hw_out, points};
  grids.jsa_grid.validate();
  grids.jca_grid.validate();
  return grids;
}

SpectralGrid plan_degenerate_grid(const LegGeometry& spdc, double sigma_p, double sigma_phi,
                                  PmfKind kind, int points, double n_sigma) {
  if (points < 64) throw Error(ErrorKind::InvalidArgument, "grid needs at least 64 points");
  const double s_dk = pmf_window_sigma(sigma_phi, kind) * spdc.gradient_norm();
  const Window w = covariance_window(1.0, 1.0, sigma_p, spdc.grad1, spdc.grad2, s_dk, n_sigma,
                                     spdc.center1, spdc.center2);
  const double hw = std::max(w.hw1, w.hw2);
  SpectralGrid g{spdc.center1, spdc.center2, hw, hw, points};
  g.validate();
  return g;
}

FcAmplitudes build_fc_amplitudes(const CrystalDispersion& crystal, const LegGeometry& spdc,
                                 const LegGeometry& sfc, const FcBandwidths& bw, PmfKind kind,
                                 int points) {
  const FcGrids grids = plan_fc_grids(spdc, sfc, bw, kind, points);
  const double omega_p = spdc.center1 + spdc.center2;
  const double omega_e = sfc.center2 - sfc.center1;

  FcAmplitudes out;
  const JointAmplitude alpha = pump_envelope(grids.jsa_grid, bw.sigma_p, omega_p);
  const JointAmplitude beta = escort_envelope(grids.jca_grid, bw.sigma_e, omega_e);
  if (kind == PmfKind::Sinc) {
    out.f_jsa = jsa(alpha, pmf_sinc(crystal, grids.jsa_grid, spdc,
                                    length_from_pmf_sigma(spdc, bw.sigma_phi, kind)));
    out.f_jca = jca(beta, pmf_sinc(crystal, grids.jca_grid, sfc,
                                   length_from_pmf_sigma(sfc, bw.sigma_psi, kind)));
  } else {
    out.f_jsa = jsa(alpha, pmf_gaussian(crystal, grids.jsa_grid, spdc, bw.sigma_phi));
    out.f_jca = jca(beta, pmf_gaussian(crystal, grids.jca_grid, sfc, bw.sigma_psi));
  }
  out.f_eff = effective_jsa(out.f_jca, out.f_jsa);
  return out;
}

JointAmplitude build_degenerate_jsa(const CrystalDispersion& crystal, const LegGeometry& spdc,
                                    double sigma_p, double sigma_phi, PmfKind kind, int points) {
  const SpectralGrid grid = plan_degenerate_grid(spdc, sigma_p, sigma_phi, kind, points);
  const JointAmplitude alpha = pump_envelope(grid, sigma_p, spdc.center1 + spdc.center2);
  if (kind == PmfKind::Sinc) {
    return jsa(alpha, pmf_sinc(crystal, grid, spdc,
                               length_from_pmf_sigma(spdc, sigma_phi, kind)));
  }
  return jsa(alpha, pmf_gaussian(crystal, grid, spdc, sigma_phi));
}

}  // namespace fcspdc
