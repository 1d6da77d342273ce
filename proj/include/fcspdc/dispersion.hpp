#ifndef FCSPDC_DISPERSION_HPP
#define FCSPDC_DISPERSION_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fcspdc/error.hpp"

namespace fcspdc {

enum class Crystal { Ktp, Ln, MgLn };
enum class Axis { X, Y, Z };

const char* to_string(Crystal c);
const char* to_string(Axis a);
Crystal crystal_from_string(const std::string& name);

/// One Sellmeier coefficient set for a single crystallographic axis.
struct SellmeierSet {
  // form "pole3":   n^2 = c0 + c1/(l^2-c2) + c3/(l^2-c4)          (l in um)
  // form "zelmon3": n^2 = 1 + sum_i c(2i) l^2/(l^2 - c(2i+1))
  std::string form;
  std::vector<double> coefficients;
  double fit_min_nm = 0.0;   // fitted validity of the published equation
  double fit_max_nm = 0.0;
  std::string citation;
};

/// Thermo-optic correction dn = p1(l) dT + p2(l) dT^2 with
/// p(l) = (a0 + a1/l + a2/l^2 + a3/l^3) * scale, dT relative to the
/// operating temperature so the correction vanishes there.
struct ThermoOpticSet {
  std::array<double, 4> n1{};
  std::array<double, 4> n2{};
  double scale1 = 1e-6;
  double scale2 = 1e-8;
  std::string citation;
};

class CrystalDispersion {
 public:
  static const CrystalDispersion& get(Crystal id);

  // Replaces the embedded coefficient tables with the contents of a JSON
  // file (same schema as data/sellmeier.json). Affects subsequent get().
  static void load_coefficients(const std::string& json_path);
  static void reset_embedded();

  Crystal id() const { return id_; }
  double temperature_celsius() const { return temperature_c_; }
  bool uniaxial() const { return id_ != Crystal::Ktp; }

  /// n(lambda) on the given axis at the fixed operating temperature.
  /// For uniaxial crystals axis X maps onto the ordinary axis (Y) unless
  /// strict_axes is set, in which case it throws UnknownAxis.
  double refractive_index(Axis axis, double lambda_nm) const;
  bool is_extrapolated(double lambda_nm) const;

  /// k = 2 pi n / lambda in rad/um.
  double wave_number(Axis axis, double lambda_nm) const;

  /// k' = dk/domega in fs/um, Richardson-extrapolated central difference.
  double inverse_group_velocity(Axis axis, double lambda_nm) const;

  double wave_number_at_omega(Axis axis, double omega_rad_fs) const;
  double inverse_group_velocity_at_omega(Axis axis, double omega_rad_fs) const;

  double hard_min_nm() const { return hard_min_nm_; }
  double hard_max_nm() const { return hard_max_nm_; }
  double absorption_cutoff_nm() const { return cutoff_nm_; }

  /// Shortest lambda_deg the frequency-converted source can reach (4/3 of
  /// the pump absorption edge the sweeps actually use).
  double fc_floor_nm() const { return fc_floor_nm_; }

  void set_strict_axes(bool strict) { strict_axes_ = strict; }

 private:
  const SellmeierSet& set_for(Axis axis) const;
  double index_raw(const SellmeierSet& set, double lambda_um) const;

  Crystal id_;
  std::array<std::optional<SellmeierSet>, 3> axes_;
  std::array<std::optional<ThermoOpticSet>, 3> thermo_;
  double cutoff_nm_ = 0.0;
  double fc_floor_nm_ = 0.0;
  double hard_min_nm_ = 0.0;
  double hard_max_nm_ = 0.0;
  double temperature_c_ = 20.0;
  bool strict_axes_ = false;

  friend struct CrystalTable;
};

enum class ProcessLeg { Spdc, Sfc };

/// Quasi-phase-matching grating solved for first-order momentum balance.
/// `sign` is the direction of the grating vector: the phase mismatch is
/// evaluated as dk0 - sign * 2 pi m / period.
struct PolingSolution {
  double period_um = 0.0;
  int sign = 1;
  int order = 1;

  double grating_rad_um() const;
  /// Period carrying the grating direction; mismatch formulas use this.
  double signed_period_um() const { return sign >= 0 ? period_um : -period_um; }
};

struct AxisWavelength {
  Axis axis;
  double lambda_nm;
};

/// Solves 2 pi m / Lambda = |k_parent - k_daughter1 - k_daughter2| for the
/// triple (parent, daughter1, daughter2). For the SPDC leg the parent is the
/// pump; for the SFC leg it is the frequency-converted photon and the
/// daughters are escort and input idler. Energy conservation across the
/// triple is checked to relative 1e-9.
PolingSolution solve_poling_period(const CrystalDispersion& crystal, ProcessLeg leg,
                                   const AxisWavelength& parent, const AxisWavelength& daughter1,
                                   const AxisWavelength& daughter2, int order = 1);

}  // namespace fcspdc

#endif
