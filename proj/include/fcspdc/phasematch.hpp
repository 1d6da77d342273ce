#ifndef FCSPDC_PHASEMATCH_HPP
#define FCSPDC_PHASEMATCH_HPP

#include <array>
#include <string>
#include <vector>

#include "fcspdc/dispersion.hpp"

namespace fcspdc {

/// One row of the configuration catalog: polarization triplets for the two
/// cascaded processes. SPDC reads pump -> idler + signal, SFC reads
/// escort + idler -> converted.
struct PhaseMatchConfig {
  int id = 0;  // 1..8
  Axis spdc_pump, spdc_idler, spdc_signal;
  Axis sfc_escort, sfc_idler, sfc_converted;

  std::string roman() const;
};

/// Catalog rows admissible for the crystal: 8 for biaxial KTP, the first 4
/// for the uniaxial niobates.
std::vector<PhaseMatchConfig> list_configs(Crystal crystal);
const PhaseMatchConfig& config_by_id(Crystal crystal, int id);

/// Polarization triplet (pump, signal, idler) used for the conventional
/// degenerate type-2 comparisons and the GVM curves.
struct Type2Triplet {
  Axis pump, signal, idler;
};
Type2Triplet conventional_type2(Crystal crystal);

/// Wavelengths of all five waves implied by a target degeneracy wavelength:
/// the pump splits into signal (at lambda_deg) and idler (at 3 lambda_deg),
/// and the escort at 3/2 lambda_deg converts the idler back to lambda_deg.
struct FrequencyRelations {
  explicit FrequencyRelations(double lambda_deg_nm);

  double lambda_deg_nm;
  double lambda_pump_nm;    // 3/4 lambda_deg
  double lambda_escort_nm;  // 3/2 lambda_deg
  double lambda_idler_nm;   // 3 lambda_deg
  double lambda_signal_nm;  // lambda_deg
  double lambda_fc_nm;      // lambda_deg

  double omega_pump() const;
  double omega_escort() const;
  double omega_idler() const;
  double omega_signal() const;
  double omega_fc() const;
};

/// dk = k_p(w_p) - k_s(w_s) - k_i(w_i) - grating, axes from the config.
double spdc_mismatch(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                     double omega_p, double omega_s, double omega_i,
                     const PolingSolution& grating);

/// dk = k_fc(w_fc) - k_e(w_fc - w_i) - k_i(w_i) - grating.
double sfc_mismatch(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                    double omega_i, double omega_fc, const PolingSolution& grating);

PolingSolution solve_spdc_poling(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                                 const FrequencyRelations& rel);
PolingSolution solve_sfc_poling(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                                const FrequencyRelations& rel);

/// First-order ridge direction of the phase-matching function,
/// d(dw_i)/d(dw_s) = (k_p' - k_s')/(k_i' - k_p').
struct JsaOrientation {
  double slope = 0.0;
  bool vertical = false;  // |k_i' - k_p'| below threshold; slope reported as +-inf
};
JsaOrientation jsa_orientation(const CrystalDispersion& crystal, Axis pump_axis, Axis signal_axis,
                               Axis idler_axis, double lambda_p_nm, double lambda_s_nm,
                               double lambda_i_nm);
JsaOrientation jsa_orientation(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                               const FrequencyRelations& rel);

enum class GvmCondition { Vertical, Circular, Horizontal };
const char* to_string(GvmCondition c);

struct GvmPoint {
  double lambda_s_nm;
  double lambda_i_nm;
  double lambda_p_nm;
};

struct GvmCurve {
  GvmCondition condition;
  std::vector<GvmPoint> points;
  std::vector<GvmPoint> degeneracy_crossings;  // intersections with lambda_s = lambda_i
};

/// Traces the loci where the group velocities satisfy each matching
/// condition, for the conventional type-2 triplet. Signal wavelengths are
/// scanned on a 1 nm grid and each root is refined by bisection.
std::vector<GvmCurve> trace_gvm_curves(const CrystalDispersion& crystal,
                                       const Type2Triplet& triplet, double lambda_s_min_nm,
                                       double lambda_s_max_nm, double scan_step_nm = 1.0);

}  // namespace fcspdc

#endif
