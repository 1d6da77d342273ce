#include "fcspdc/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fcspdc/units.hpp"

namespace fcspdc {

using nlohmann::json;

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::UnknownAxis: return "UnknownAxis";
    case ErrorKind::NoPhaseMatch: return "NoPhaseMatch";
    case ErrorKind::EnergyMismatch: return "EnergyMismatch";
    case ErrorKind::DegenerateSlope: return "DegenerateSlope";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::EmptyBand: return "EmptyBand";
    case ErrorKind::ZeroAmplitude: return "ZeroAmplitude";
    case ErrorKind::NonSquareGrid: return "NonSquareGrid";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::BelowCutoff: return "BelowCutoff";
    case ErrorKind::InfeasibleConstraints: return "InfeasibleConstraints";
    case ErrorKind::Unachievable: return "Unachievable";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

const char* to_string(Crystal c) {
  switch (c) {
    case Crystal::Ktp: return "ktp";
    case Crystal::Ln: return "ln";
    case Crystal::MgLn: return "mgln";
  }
  return "?";
}

const char* to_string(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

Crystal crystal_from_string(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
  if (s == "ktp") return Crystal::Ktp;
  if (s == "ln" || s == "linbo3") return Crystal::Ln;
  if (s == "mgln" || s == "mglinbo3") return Crystal::MgLn;
  throw Error(ErrorKind::InvalidArgument, "unknown crystal '" + name + "'");
}

namespace detail {
// Embedded copy of data/sellmeier.json; generated at configure time.
const char* embedded_crystal_data();
}  // namespace detail

namespace {

Axis axis_from_string(const std::string& s) {
  if (s == "x" || s == "X") return Axis::X;
  if (s == "y" || s == "Y") return Axis::Y;
  if (s == "z" || s == "Z") return Axis::Z;
  throw Error(ErrorKind::UnknownAxis, "unknown axis '" + s + "'");
}

}  // namespace

struct CrystalTable {
  std::map<Crystal, CrystalDispersion> entries;

  static CrystalTable parse(const std::string& text) {
    CrystalTable table;
    json root = json::parse(text);
    const double temperature = root.value("temperature_celsius", 20.0);
    for (const auto& cj : root.at("crystals")) {
      CrystalDispersion d;
      d.id_ = crystal_from_string(cj.at("crystal").get<std::string>());
      d.temperature_c_ = temperature;
      d.cutoff_nm_ = cj.at("absorption_cutoff_nm").get<double>();
      d.fc_floor_nm_ = cj.at("fc_floor_nm").get<double>();
      d.hard_min_nm_ = cj.at("hard_range_nm").at(0).get<double>();
      d.hard_max_nm_ = cj.at("hard_range_nm").at(1).get<double>();
      for (const auto& aj : cj.at("axes")) {
        SellmeierSet set;
        set.form = aj.at("form").get<std::string>();
        set.coefficients = aj.at("coefficients").get<std::vector<double>>();
        set.fit_min_nm = aj.at("fit_range_nm").at(0).get<double>();
        set.fit_max_nm = aj.at("fit_range_nm").at(1).get<double>();
        set.citation = aj.value("source_citation", "");
        d.axes_[static_cast<int>(axis_from_string(aj.at("axis").get<std::string>()))] = set;
      }
      if (cj.contains("thermo_optic")) {
        for (const auto& tj : cj.at("thermo_optic")) {
          ThermoOpticSet t;
          auto n1 = tj.at("n1").get<std::vector<double>>();
          auto n2 = tj.at("n2").get<std::vector<double>>();
          std::copy_n(n1.begin(), 4, t.n1.begin());
          std::copy_n(n2.begin(), 4, t.n2.begin());
          if (tj.contains("scales")) {
            t.scale1 = tj.at("scales").at(0).get<double>();
            t.scale2 = tj.at("scales").at(1).get<double>();
          }
          t.citation = tj.value("source_citation", "");
          d.thermo_[static_cast<int>(axis_from_string(tj.at("axis").get<std::string>()))] = t;
        }
      }
      table.entries.emplace(d.id_, std::move(d));
    }
    return table;
  }
};

namespace {

std::mutex g_table_mutex;
CrystalTable* g_table = nullptr;

CrystalTable& table() {
  std::lock_guard<std::mutex> lock(g_table_mutex);
  if (!g_table) g_table = new CrystalTable(CrystalTable::parse(detail::embedded_crystal_data()));
  return *g_table;
}

}  // namespace

const CrystalDispersion& CrystalDispersion::get(Crystal id) {
  auto& t = table();
  auto it = t.entries.find(id);
  if (it == t.entries.end())
    throw Error(ErrorKind::InvalidArgument, std::string("no coefficient set for ") + to_string(id));
  return it->second;
}

void CrystalDispersion::load_coefficients(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw Error(ErrorKind::Io, "cannot open crystal data file " + json_path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto parsed = CrystalTable::parse(ss.str());
  std::lock_guard<std::mutex> lock(g_table_mutex);
  delete g_table;
  g_table = new CrystalTable(std::move(parsed));
}

void CrystalDispersion::reset_embedded() {
  std::lock_guard<std::mutex> lock(g_table_mutex);
  delete g_table;
  g_table = nullptr;
}

const SellmeierSet& CrystalDispersion::set_for(Axis axis) const {
  if (uniaxial() && axis == Axis::X) {
    if (strict_axes_)
      throw Error(ErrorKind::UnknownAxis,
                  std::string(to_string(id_)) + " has no independent X axis (strict axis mode)");
    axis = Axis::Y;  // ordinary
  }
  const auto& set = axes_[static_cast<int>(axis)];
  if (!set)
    throw Error(ErrorKind::UnknownAxis,
                std::string("no Sellmeier set for ") + to_string(id_) + " axis " + to_string(axis));
  return *set;
}

double CrystalDispersion::index_raw(const SellmeierSet& set, double lambda_um) const {
  const double l2 = lambda_um * lambda_um;
  const auto& c = set.coefficients;
  double n2 = 0.0;
  if (set.form == "pole3") {
    n2 = c[0] + c[1] / (l2 - c[2]) + c[3] / (l2 - c[4]);
  } else if (set.form == "zelmon3") {
    n2 = 1.0;
    for (std::size_t i = 0; i + 1 < c.size(); i += 2) n2 += c[i] * l2 / (l2 - c[i + 1]);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown Sellmeier form '" + set.form + "'");
  }
  if (!(n2 > 0.0))
    throw Error(ErrorKind::OutOfRange, "Sellmeier evaluation left the physical branch");
  return std::sqrt(n2);
}

bool CrystalDispersion::is_extrapolated(double lambda_nm) const {
  for (const auto& set : axes_) {
    if (set && (lambda_nm < set->fit_min_nm || lambda_nm > set->fit_max_nm)) return true;
  }
  return false;
}

double CrystalDispersion::refractive_index(Axis axis, double lambda_nm) const {
  if (!(lambda_nm >= hard_min_nm_ && lambda_nm <= hard_max_nm_)) {
    std::ostringstream msg;
    msg << to_string(id_) << ": " << lambda_nm << " nm outside usable window [" << hard_min_nm_
        << ", " << hard_max_nm_ << "] nm";
    throw Error(ErrorKind::OutOfRange, msg.str());
  }
  const SellmeierSet& set = set_for(axis);
  const double lambda_um = lambda_nm * 1e-3;
  double n = index_raw(set, lambda_um);

  const auto& thermo =
      thermo_[static_cast<int>(uniaxial() && axis == Axis::X ? Axis::Y : axis)];
  if (thermo) {
    // Correction is referenced to the operating temperature, so it vanishes
    // until temperature tuning is wired up.
    const double dt = temperature_c_ - 20.0;
    if (dt != 0.0) {
      auto poly = [&](const std::array<double, 4>& a) {
        const double il = 1.0 / lambda_um;
        return a[0] + il * (a[1] + il * (a[2] + il * a[3]));
      };
      n += poly(thermo->n1) * thermo->scale1 * dt + poly(thermo->n2) * thermo->scale2 * dt * dt;
    }
  }
  return n;
}

double CrystalDispersion::wave_number(Axis axis, double lambda_nm) const {
  const double lambda_um = lambda_nm * 1e-3;
  return units::two_pi * refractive_index(axis, lambda_nm) / lambda_um;
}

double CrystalDispersion::wave_number_at_omega(Axis axis, double omega_rad_fs) const {
  if (!(omega_rad_fs > 0.0))
    throw Error(ErrorKind::InvalidArgument, "wave_number_at_omega: omega must be positive");
  return wave_number(axis, units::nm_from_omega(omega_rad_fs));
}

double CrystalDispersion::inverse_group_velocity_at_omega(Axis axis, double omega_rad_fs) const {
  // Richardson-extrapolated central difference; relative step keeps the
  // stencil well inside the usable window before the window check triggers.
  const double h = omega_rad_fs * 1e-4;
  auto k = [&](double w) { return wave_number_at_omega(axis, w); };
  const double d1 = (k(omega_rad_fs + h) - k(omega_rad_fs - h)) / (2.0 * h);
  const double d2 = (k(omega_rad_fs + 0.5 * h) - k(omega_rad_fs - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

double CrystalDispersion::inverse_group_velocity(Axis axis, double lambda_nm) const {
  return inverse_group_velocity_at_omega(axis, units::omega_from_nm(lambda_nm));
}

double PolingSolution::grating_rad_um() const {
  return sign * units::two_pi * order / period_um;
}

PolingSolution solve_poling_period(const CrystalDispersion& crystal, ProcessLeg leg,
                                   const AxisWavelength& parent, const AxisWavelength& daughter1,
                                   const AxisWavelength& daughter2, int order) {
  const double wp = units::omega_from_nm(parent.lambda_nm);
  const double w1 = units::omega_from_nm(daughter1.lambda_nm);
  const double w2 = units::omega_from_nm(daughter2.lambda_nm);
  if (std::abs(wp - w1 - w2) > 1e-9 * wp) {
    std::ostringstream msg;
    msg << "wavelength triple violates energy conservation for the "
        << (leg == ProcessLeg::Spdc ? "SPDC" : "SFC") << " leg: " << parent.lambda_nm << " -> "
        << daughter1.lambda_nm << " + " << daughter2.lambda_nm << " nm";
    throw Error(ErrorKind::EnergyMismatch, msg.str());
  }
  const double residual = crystal.wave_number(parent.axis, parent.lambda_nm) -
                          crystal.wave_number(daughter1.axis, daughter1.lambda_nm) -
                          crystal.wave_number(daughter2.axis, daughter2.lambda_nm);
  // The grating can supply momentum of either sign; a residual at numerical
  // zero means the process is already phase matched and no finite period
  // exists.
  if (std::abs(residual) < 1e-9) {
    throw Error(ErrorKind::NoPhaseMatch,
                "wave-number balance is already zero; no finite poling period");
  }
  PolingSolution sol;
  sol.order = order;
  sol.sign = residual > 0.0 ? 1 : -1;
  sol.period_um = units::two_pi * order / std::abs(residual);
  return sol;
}

}  // namespace fcspdc

#include "sellmeier_embedded.inc"
