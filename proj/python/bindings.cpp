#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fcspdc/metrics.hpp"
#include "fcspdc/optimizer.hpp"
#include "fcspdc/phasematch.hpp"
#include "fcspdc/spectra.hpp"
#include "fcspdc/units.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace fcspdc;

namespace {

Axis axis_from(const std::string& s) {
  if (s == "x" || s == "X") return Axis::X;
  if (s == "y" || s == "Y") return Axis::Y;
  if (s == "z" || s == "Z") return Axis::Z;
  throw Error(ErrorKind::UnknownAxis, "unknown axis '" + s + "'");
}

JointAmplitude wrap_matrix(const Eigen::MatrixXcd& values) {
  if (values.rows() != values.cols())
    throw Error(ErrorKind::NonSquareGrid, "matrix metrics need a square matrix");
  JointAmplitude f;
  f.grid = SpectralGrid{1.0, 1.0, 0.1, 0.1, static_cast<int>(values.rows())};
  f.values = values;
  return f;
}

py::dict metrics_dict(const MetricsReport& m) {
  py::dict d;
  d["purity"] = m.purity;
  d["schmidt_number"] = m.schmidt_number;
  d["indistinguishability"] = m.indistinguishability;
  d["heralding_efficiency"] = m.heralding_efficiency;
  d["conversion_efficiency"] = m.conversion_efficiency;
  d["pair_pass_probability"] = m.pair_pass_probability;
  return d;
}

py::dict bandwidths_dict(const BandwidthSet& b) {
  py::dict d;
  d["sigma_p"] = b.absolute.sigma_p;
  d["sigma_e"] = b.absolute.sigma_e;
  d["sigma_phi"] = b.absolute.sigma_phi;
  d["sigma_psi"] = b.absolute.sigma_psi;
  d["sigma_p_normalized"] = b.normalized.sigma_p;
  d["sigma_e_normalized"] = b.normalized.sigma_e;
  d["sigma_phi_normalized"] = b.normalized.sigma_phi;
  d["sigma_psi_normalized"] = b.normalized.sigma_psi;
  d["output_sigma"] = b.output_sigma;
  d["length_spdc_um"] = b.length_spdc_um;
  d["length_sfc_um"] = b.length_sfc_um;
  return d;
}

py::dict result_dict(const SweepResult& r) {
  py::dict d;
  d["lambda_deg_nm"] = r.lambda_deg_nm;
  if (!r.ok()) {
    d["error"] = r.error;
    return d;
  }
  d["config"] = r.config_id;
  d["eta"] = r.best.eta;
  d["metrics"] = metrics_dict(r.best.metrics);
  d["bandwidths"] = bandwidths_dict(r.best.bandwidths);
  d["poling_spdc_um"] = r.best.poling_spdc.period_um;
  d["poling_sfc_um"] = r.best.poling_sfc.period_um;
  d["output_band"] = py::make_tuple(r.output_band.first, r.output_band.second);
  if (r.conventional) {
    py::dict c;
    c["purity_unfiltered"] = r.conventional->purity_unfiltered;
    c["purity_filtered"] = r.conventional->purity_filtered;
    c["pair_pass_filtered"] = r.conventional->pair_pass_filtered;
    c["heralding_filtered"] = r.conventional->heralding_filtered;
    d["conventional"] = c;
  }
  return d;
}

OptimizerOptions options_from(int grid_points, int search_points) {
  OptimizerOptions o;
  o.final_points = grid_points;
  o.search_points = search_points;
  return o;
}

}  // namespace

PYBIND11_MODULE(_fcspdc, m) {
  m.doc() = "frequency-converted photon-pair source simulator";
  m.attr("__version__") = "1.0.0";

  py::register_exception<Error>(m, "FcspdcError");

  m.def(
      "refractive_index",
      [](const std::string& crystal, const std::string& axis, double lambda_nm) {
        return CrystalDispersion::get(crystal_from_string(crystal))
            .refractive_index(axis_from(axis), lambda_nm);
      },
      "crystal"_a, "axis"_a, "lambda_nm"_a);

  m.def(
      "wave_number",
      [](const std::string& crystal, const std::string& axis, double lambda_nm) {
        return CrystalDispersion::get(crystal_from_string(crystal))
            .wave_number(axis_from(axis), lambda_nm);
      },
      "crystal"_a, "axis"_a, "lambda_nm"_a, "k in rad/um");

  m.def(
      "inverse_group_velocity",
      [](const std::string& crystal, const std::string& axis, double lambda_nm) {
        return CrystalDispersion::get(crystal_from_string(crystal))
            .inverse_group_velocity(axis_from(axis), lambda_nm);
      },
      "crystal"_a, "axis"_a, "lambda_nm"_a, "dk/domega in fs/um");

  m.def(
      "list_configs",
      [](const std::string& crystal) {
        py::list out;
        for (const auto& c : list_configs(crystal_from_string(crystal))) {
          py::dict d;
          d["id"] = c.id;
          d["roman"] = c.roman();
          d["spdc"] = py::make_tuple(to_string(c.spdc_pump), to_string(c.spdc_idler),
                                     to_string(c.spdc_signal));
          d["sfc"] = py::make_tuple(to_string(c.sfc_escort), to_string(c.sfc_idler),
                                    to_string(c.sfc_converted));
          out.append(d);
        }
        return out;
      },
      "crystal"_a);

  m.def(
      "frequency_relations",
      [](double lambda_deg_nm) {
        const FrequencyRelations rel(lambda_deg_nm);
        py::dict d;
        d["lambda_deg_nm"] = rel.lambda_deg_nm;
        d["lambda_pump_nm"] = rel.lambda_pump_nm;
        d["lambda_escort_nm"] = rel.lambda_escort_nm;
        d["lambda_idler_nm"] = rel.lambda_idler_nm;
        d["lambda_signal_nm"] = rel.lambda_signal_nm;
        d["lambda_fc_nm"] = rel.lambda_fc_nm;
        return d;
      },
      "lambda_deg_nm"_a);

  m.def(
      "poling_periods",
      [](const std::string& crystal, double lambda_deg_nm, int config_id) {
        const auto& d = CrystalDispersion::get(crystal_from_string(crystal));
        const auto& config = config_by_id(d.id(), config_id);
        const FrequencyRelations rel(lambda_deg_nm);
        const PolingSolution spdc = solve_spdc_poling(d, config, rel);
        const PolingSolution sfc = solve_sfc_poling(d, config, rel);
        py::dict out;
        out["spdc_um"] = spdc.period_um;
        out["spdc_sign"] = spdc.sign;
        out["sfc_um"] = sfc.period_um;
        out["sfc_sign"] = sfc.sign;
        return out;
      },
      "crystal"_a, "lambda_deg_nm"_a, "config"_a);

  m.def(
      "gvm_curves",
      [](const std::string& crystal, double lambda_min_nm, double lambda_max_nm, double step_nm) {
        const auto& d = CrystalDispersion::get(crystal_from_string(crystal));
        const auto curves =
            trace_gvm_curves(d, conventional_type2(d.id()), lambda_min_nm, lambda_max_nm, step_nm);
        py::dict out;
        for (const auto& c : curves) {
          py::dict entry;
          std::vector<double> ls, li, lp;
          for (const auto& p : c.points) {
            ls.push_back(p.lambda_s_nm);
            li.push_back(p.lambda_i_nm);
            lp.push_back(p.lambda_p_nm);
          }
          entry["lambda_s_nm"] = ls;
          entry["lambda_i_nm"] = li;
          entry["lambda_p_nm"] = lp;
          std::vector<double> crossings;
          for (const auto& p : c.degeneracy_crossings) crossings.push_back(p.lambda_s_nm);
          entry["degeneracy_crossings_nm"] = crossings;
          out[to_string(c.condition)] = entry;
        }
        return out;
      },
      "crystal"_a, "lambda_min_nm"_a, "lambda_max_nm"_a, "step_nm"_a = 2.0);

  m.def(
      "schmidt_coefficients",
      [](const Eigen::MatrixXcd& values) { return schmidt_decompose(wrap_matrix(values)).coefficients; },
      "amplitude"_a);

  m.def(
      "purity", [](const Eigen::MatrixXcd& values) { return purity(wrap_matrix(values)); },
      "amplitude"_a);

  m.def(
      "indistinguishability",
      [](const Eigen::MatrixXcd& values) { return indistinguishability(wrap_matrix(values)); },
      "amplitude"_a);

  m.def(
      "amplitudes",
      [](const std::string& crystal, double lambda_deg_nm, int config_id,
         const std::string& pmf, double sigma_p, double sigma_e, double sigma_phi,
         double sigma_psi, int points) {
        const auto& d = CrystalDispersion::get(crystal_from_string(crystal));
        const auto& config = config_by_id(d.id(), config_id);
        const FrequencyRelations rel(lambda_deg_nm);
        const FcAmplitudes amps = build_fc_amplitudes(
            d, spdc_geometry(d, config, rel), sfc_geometry(d, config, rel),
            FcBandwidths{sigma_p, sigma_e, sigma_phi, sigma_psi}, pmf_kind_from_string(pmf),
            points);
        auto pack = [](const JointAmplitude& f) {
          py::dict a;
          a["values"] = f.values;
          std::vector<double> ax1(f.grid.points), ax2(f.grid.points);
          for (int i = 0; i < f.grid.points; ++i) {
            ax1[i] = f.grid.axis1(i);
            ax2[i] = f.grid.axis2(i);
          }
          a["axis1_rad_fs"] = ax1;
          a["axis2_rad_fs"] = ax2;
          return a;
        };
        py::dict out;
        out["jsa"] = pack(amps.f_jsa);
        out["jca"] = pack(amps.f_jca);
        out["effective"] = pack(amps.f_eff);
        out["metrics"] = metrics_dict(evaluate_fc_metrics(amps));
        return out;
      },
      "crystal"_a, "lambda_deg_nm"_a, "config"_a, "pmf"_a, "sigma_p"_a, "sigma_e"_a,
      "sigma_phi"_a, "sigma_psi"_a, "points"_a = 256);

  m.def(
      "analyze",
      [](const std::string& crystal, double lambda_deg_nm, const std::string& pmf, int config,
         int grid_points, int search_points) {
        const auto& d = CrystalDispersion::get(crystal_from_string(crystal));
        const PmfKind kind = pmf_kind_from_string(pmf);
        const OptimizerOptions o = options_from(grid_points, search_points);
        if (config > 0) {
          SweepResult r;
          r.lambda_deg_nm = lambda_deg_nm;
          r.config_id = config;
          r.best = optimize_bandwidths(d, lambda_deg_nm, config, kind, {}, o);
          r.output_band = feasible_output_bandwidths(d, lambda_deg_nm, config, kind, {});
          r.conventional = conventional_baseline(d, lambda_deg_nm, kind, {}, o);
          return result_dict(r);
        }
        return result_dict(select_configuration(d, lambda_deg_nm, kind, {}, o));
      },
      "crystal"_a, "lambda_deg_nm"_a, "pmf"_a = "gaussian", "config"_a = 0,
      "grid_points"_a = 256, "search_points"_a = 96);

  m.def(
      "sweep",
      [](const std::string& crystal, const std::vector<double>& lambdas, const std::string& pmf,
         int grid_points, int search_points) {
        const auto& d = CrystalDispersion::get(crystal_from_string(crystal));
        const auto results = sweep(d, lambdas, pmf_kind_from_string(pmf), {},
                                   options_from(grid_points, search_points));
        py::list out;
        for (const auto& r : results) out.append(result_dict(r));
        return out;
      },
      "crystal"_a, "lambdas_nm"_a, "pmf"_a = "gaussian", "grid_points"_a = 256,
      "search_points"_a = 96);

  m.def("load_crystal_data", &CrystalDispersion::load_coefficients, "path"_a);
}
