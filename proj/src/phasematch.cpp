#include "fcspdc/phasematch.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fcspdc/units.hpp"

namespace fcspdc {

namespace {

constexpr Axis X = Axis::X, Y = Axis::Y, Z = Axis::Z;

// Rows I..VIII. SPDC: pump -> idler + signal. SFC: escort + idler -> converted.
const PhaseMatchConfig kCatalog[8] = {
    {1, Y, Y, Z, Z, Y, Y},
    {2, Y, Z, Y, Z, Z, Z},
    {3, Z, Z, Z, Y, Z, Y},
    {4, Z, Y, Y, Y, Y, Z},
    {5, X, X, Z, Z, X, X},
    {6, X, Z, X, Z, Z, Z},
    {7, Z, Z, Z, X, Z, X},
    {8, Z, X, X, X, X, Z},
};

const char* kRoman[8] = {"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};

// Below this derivative difference the orientation is treated as vertical.
constexpr double kSlopeEpsilon = 1e-6;  // fs/um

}  // namespace

std::string PhaseMatchConfig::roman() const { return kRoman[id - 1]; }

std::vector<PhaseMatchConfig> list_configs(Crystal crystal) {
  const int count = crystal == Crystal::Ktp ? 8 : 4;
  return std::vector<PhaseMatchConfig>(kCatalog, kCatalog + count);
}

const PhaseMatchConfig& config_by_id(Crystal crystal, int id) {
  const int count = crystal == Crystal::Ktp ? 8 : 4;
  if (id < 1 || id > count) {
    std::ostringstream msg;
    msg << "configuration " << id << " not admissible for " << to_string(crystal);
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
  return kCatalog[id - 1];
}

Type2Triplet conventional_type2(Crystal) {
  // Pump and signal share the Y column, idler on Z; reproduces the
  // degenerate group-velocity-matched landmarks for both crystal families.
  return {Y, Y, Z};
}

FrequencyRelations::FrequencyRelations(double lambda_deg_nm) : lambda_deg_nm(lambda_deg_nm) {
  if (!(lambda_deg_nm > 0.0))
    throw Error(ErrorKind::InvalidArgument, "lambda_deg must be positive");
  lambda_pump_nm = 0.75 * lambda_deg_nm;
  lambda_escort_nm = 1.5 * lambda_deg_nm;
  lambda_idler_nm = 3.0 * lambda_deg_nm;
  lambda_signal_nm = lambda_deg_nm;
  lambda_fc_nm = lambda_deg_nm;
}

double FrequencyRelations::omega_pump() const { return units::omega_from_nm(lambda_pump_nm); }
double FrequencyRelations::omega_escort() const { return units::omega_from_nm(lambda_escort_nm); }
double FrequencyRelations::omega_idler() const { return units::omega_from_nm(lambda_idler_nm); }
double FrequencyRelations::omega_signal() const { return units::omega_from_nm(lambda_signal_nm); }
double FrequencyRelations::omega_fc() const { return units::omega_from_nm(lambda_fc_nm); }

double spdc_mismatch(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                     double omega_p, double omega_s, double omega_i,
                     const PolingSolution& grating) {
  return crystal.wave_number_at_omega(config.spdc_pump, omega_p) -
         crystal.wave_number_at_omega(config.spdc_signal, omega_s) -
         crystal.wave_number_at_omega(config.spdc_idler, omega_i) - grating.grating_rad_um();
}

double sfc_mismatch(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                    double omega_i, double omega_fc, const PolingSolution& grating) {
  return crystal.wave_number_at_omega(config.sfc_converted, omega_fc) -
         crystal.wave_number_at_omega(config.sfc_escort, omega_fc - omega_i) -
         crystal.wave_number_at_omega(config.sfc_idler, omega_i) - grating.grating_rad_um();
}

PolingSolution solve_spdc_poling(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                                 const FrequencyRelations& rel) {
  return solve_poling_period(crystal, ProcessLeg::Spdc,
                             {config.spdc_pump, rel.lambda_pump_nm},
                             {config.spdc_signal, rel.lambda_signal_nm},
                             {config.spdc_idler, rel.lambda_idler_nm});
}

PolingSolution solve_sfc_poling(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                                const FrequencyRelations& rel) {
  return solve_poling_period(crystal, ProcessLeg::Sfc,
                             {config.sfc_converted, rel.lambda_fc_nm},
                             {config.sfc_escort, rel.lambda_escort_nm},
                             {config.sfc_idler, rel.lambda_idler_nm});
}

JsaOrientation jsa_orientation(const CrystalDispersion& crystal, Axis pump_axis, Axis signal_axis,
                               Axis idler_axis, double lambda_p_nm, double lambda_s_nm,
                               double lambda_i_nm) {
  const double wp = units::omega_from_nm(lambda_p_nm);
  const double ws = units::omega_from_nm(lambda_s_nm);
  const double wi = units::omega_from_nm(lambda_i_nm);
  if (std::abs(wp - ws - wi) > 1e-9 * wp)
    throw Error(ErrorKind::EnergyMismatch, "central wavelengths violate energy conservation");
  const double kp = crystal.inverse_group_velocity(pump_axis, lambda_p_nm);
  const double ks = crystal.inverse_group_velocity(signal_axis, lambda_s_nm);
  const double ki = crystal.inverse_group_velocity(idler_axis, lambda_i_nm);
  JsaOrientation out;
  const double denom = ki - kp;
  if (std::abs(denom) < kSlopeEpsilon) {
    out.vertical = true;
    out.slope = (kp - ks) * std::numeric_limits<double>::infinity() *
                (denom >= 0.0 ? 1.0 : -1.0);
    if (std::isnan(out.slope)) out.slope = std::numeric_limits<double>::infinity();
    return out;
  }
  out.slope = (kp - ks) / denom;
  return out;
}

JsaOrientation jsa_orientation(const CrystalDispersion& crystal, const PhaseMatchConfig& config,
                               const FrequencyRelations& rel) {
  return jsa_orientation(crystal, config.spdc_pump, config.spdc_signal, config.spdc_idler,
                         rel.lambda_pump_nm, rel.lambda_signal_nm, rel.lambda_idler_nm);
}

const char* to_string(GvmCondition c) {
  switch (c) {
    case GvmCondition::Vertical: return "vertical";
    case GvmCondition::Circular: return "circular";
    case GvmCondition::Horizontal: return "horizontal";
  }
  return "?";
}

namespace {

double pump_lambda_nm(double lambda_s_nm, double lambda_i_nm) {
  return 1.0 / (1.0 / lambda_s_nm + 1.0 / lambda_i_nm);
}

// Residual of one matching condition at (lambda_s, lambda_i); pump implied
// by energy conservation.
double gvm_residual(const CrystalDispersion& crystal, const Type2Triplet& t, GvmCondition cond,
                    double lambda_s_nm, double lambda_i_nm) {
  const double lp = pump_lambda_nm(lambda_s_nm, lambda_i_nm);
  const double kp = crystal.inverse_group_velocity(t.pump, lp);
  switch (cond) {
    case GvmCondition::Vertical:
      return kp - crystal.inverse_group_velocity(t.idler, lambda_i_nm);
    case GvmCondition::Horizontal:
      return kp - crystal.inverse_group_velocity(t.signal, lambda_s_nm);
    case GvmCondition::Circular:
      return kp - 0.5 * (crystal.inverse_group_velocity(t.idler, lambda_i_nm) +
                         crystal.inverse_group_velocity(t.signal, lambda_s_nm));
  }
  return 0.0;
}

}  // namespace

std::vector<GvmCurve> trace_gvm_curves(const CrystalDispersion& crystal,
                                       const Type2Triplet& triplet, double lambda_s_min_nm,
                                       double lambda_s_max_nm, double scan_step_nm) {
  if (!(lambda_s_min_nm < lambda_s_max_nm) || !(scan_step_nm > 0.0))
    throw Error(ErrorKind::InvalidArgument, "bad GVM scan range");

  // lambda_i scan window: the idler must stay inside the usable window and
  // above the pump-wavelength floor (lambda_i > lambda_p requires
  // lambda_i > lambda_s is not necessary, but lambda_p must stay valid).
  const double li_max = crystal.hard_max_nm() - 1.0;

  std::vector<GvmCurve> curves;
  for (GvmCondition cond :
       {GvmCondition::Vertical, GvmCondition::Circular, GvmCondition::Horizontal}) {
    GvmCurve curve;
    curve.condition = cond;
    for (double ls = lambda_s_min_nm; ls <= lambda_s_max_nm + 1e-9; ls += scan_step_nm) {
      // bracket scan in lambda_i
      const double li_lo = std::max(crystal.hard_min_nm() * 2.2, ls * 0.3);
      double prev_li = 0.0, prev_r = 0.0;
      bool have_prev = false;
      for (double li = li_lo; li <= li_max; li += scan_step_nm * 4.0) {
        if (pump_lambda_nm(ls, li) < crystal.hard_min_nm() + 1.0) continue;
        double r;
        try {
          r = gvm_residual(crystal, triplet, cond, ls, li);
        } catch (const Error&) {
          have_prev = false;
          continue;
        }
        if (have_prev && prev_r * r <= 0.0 && std::isfinite(r)) {
          double a = prev_li, b = li, fa = prev_r;
          while (b - a > 1e-4) {
            const double m = 0.5 * (a + b);
            const double fm = gvm_residual(crystal, triplet, cond, ls, m);
            if (fa * fm <= 0.0) {
              b = m;
            } else {
              a = m;
              fa = fm;
            }
          }
          curve.points.push_back({ls, 0.5 * (a + b), pump_lambda_nm(ls, 0.5 * (a + b))});
          break;  // single root per scan line in the bands of interest
        }
        prev_li = li;
        prev_r = r;
        have_prev = true;
      }
    }
    // degeneracy crossings: sign change of (lambda_i - lambda_s) along the curve
    for (std::size_t j = 1; j < curve.points.size(); ++j) {
      const double d0 = curve.points[j - 1].lambda_i_nm - curve.points[j - 1].lambda_s_nm;
      const double d1 = curve.points[j].lambda_i_nm - curve.points[j].lambda_s_nm;
      if (d0 * d1 <= 0.0 && (d0 != 0.0 || d1 != 0.0)) {
        // refine on the diagonal: residual as a function of the common wavelength
        double a = curve.points[j - 1].lambda_s_nm, b = curve.points[j].lambda_s_nm;
        auto diag = [&](double l) { return gvm_residual(crystal, triplet, cond, l, l); };
        double fa = diag(a);
        for (int it = 0; it < 60 && b - a > 1e-4; ++it) {
          const double m = 0.5 * (a + b);
          const double fm = diag(m);
          if (fa * fm <= 0.0) {
            b = m;
          } else {
            a = m;
            fa = fm;
          }
        }
        const double l = 0.5 * (a + b);
        curve.degeneracy_crossings.push_back({l, l, pump_lambda_nm(l, l)});
      }
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace fcspdc
