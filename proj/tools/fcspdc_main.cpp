// Command-line front end: configuration catalog, group-velocity-matching
// curves, single-point source analysis, and wavelength sweeps with figure
// packs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fcspdc/metrics.hpp"
#include "fcspdc/optimizer.hpp"
#include "fcspdc/phasematch.hpp"
#include "fcspdc/spectra.hpp"
#include "fcspdc/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fcspdc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitPhysics = 3;
constexpr int kExitPartialSweep = 4;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct GlobalOptions {
  std::string crystal = "ktp";
  std::string pmf = "gaussian";
  int grid_points = 512;
  int search_points = 96;
  unsigned seed = 0;
  std::string out_dir;
  std::string crystal_data;

  const CrystalDispersion& dispersion() const {
    return CrystalDispersion::get(crystal_from_string(crystal));
  }
  OptimizerOptions optimizer_options() const {
    OptimizerOptions o;
    o.search_points = search_points;
    o.final_points = grid_points >= 64 ? std::min(grid_points, 512) : 256;
    o.seed = seed;
    return o;
  }
  void ensure_out_dir() const {
    if (!out_dir.empty()) fs::create_directories(out_dir);
  }
  std::string out_path(const std::string& name) const {
    return out_dir.empty() ? name : (fs::path(out_dir) / name).string();
  }
};

std::string axis_arrow_spdc(const PhaseMatchConfig& c) {
  std::string s;
  s += to_string(c.spdc_pump);
  s += " -> ";
  s += to_string(c.spdc_idler);
  s += "+";
  s += to_string(c.spdc_signal);
  return s;
}

std::string axis_arrow_sfc(const PhaseMatchConfig& c) {
  std::string s;
  s += to_string(c.sfc_escort);
  s += "+";
  s += to_string(c.sfc_idler);
  s += " -> ";
  s += to_string(c.sfc_converted);
  return s;
}

int cmd_configs(const GlobalOptions& g) {
  std::printf("config  spdc      sfc\n");
  for (const auto& c : list_configs(crystal_from_string(g.crystal))) {
    std::printf("%-7s %-9s %s\n", c.roman().c_str(), axis_arrow_spdc(c).c_str(),
                axis_arrow_sfc(c).c_str());
  }
  return kExitOk;
}

struct GvmArgs {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double step = 2.0;
};

int cmd_gvm(const GlobalOptions& g, GvmArgs args) {
  const auto& crystal = g.dispersion();
  if (args.lambda_min == 0.0 || args.lambda_max == 0.0) {
    if (crystal.id() == Crystal::Ktp) {
      args.lambda_min = 1200.0;
      args.lambda_max = 2200.0;
    } else {
      args.lambda_min = 3000.0;
      args.lambda_max = 4000.0;
    }
  }
  if (args.lambda_max <= crystal.hard_min_nm() || args.lambda_min >= crystal.hard_max_nm()) {
    std::ostringstream msg;
    msg << "requested band [" << args.lambda_min << ", " << args.lambda_max
        << "] nm lies outside the usable window of " << to_string(crystal.id());
    throw Error(ErrorKind::OutOfRange, msg.str());
  }

  const auto curves = trace_gvm_curves(crystal, conventional_type2(crystal.id()),
                                       args.lambda_min, args.lambda_max, args.step);
  std::ostringstream csv;
  csv << "condition,lambda_s_nm,lambda_i_nm,lambda_p_nm\n";
  std::size_t total = 0;
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      csv << to_string(curve.condition) << "," << fmt(p.lambda_s_nm) << ","
          << fmt(p.lambda_i_nm) << "," << fmt(p.lambda_p_nm) << "\n";
      ++total;
    }
    for (const auto& p : curve.degeneracy_crossings) {
      csv << to_string(curve.condition) << ":degenerate," << fmt(p.lambda_s_nm) << ","
          << fmt(p.lambda_i_nm) << "," << fmt(p.lambda_p_nm) << "\n";
    }
  }
  std::fputs(csv.str().c_str(), stdout);
  if (!g.out_dir.empty()) {
    g.ensure_out_dir();
    std::ofstream(g.out_path("gvm_" + g.crystal + ".csv")) << csv.str();
  }
  if (total == 0) std::fprintf(stderr, "warning: no matching loci in the requested band\n");
  return kExitOk;
}

json bandwidths_to_json(const BandwidthSet& b) {
  return json{{"sigma_p_rad_fs", b.absolute.sigma_p},
              {"sigma_e_rad_fs", b.absolute.sigma_e},
              {"sigma_phi_rad_fs", b.absolute.sigma_phi},
              {"sigma_psi_rad_fs", b.absolute.sigma_psi},
              {"sigma_p_normalized", b.normalized.sigma_p},
              {"sigma_e_normalized", b.normalized.sigma_e},
              {"sigma_phi_normalized", b.normalized.sigma_phi},
              {"sigma_psi_normalized", b.normalized.sigma_psi},
              {"output_sigma_rad_fs", b.output_sigma},
              {"length_spdc_um", b.length_spdc_um},
              {"length_sfc_um", b.length_sfc_um}};
}

BandwidthSet bandwidths_from_json(const json& j) {
  BandwidthSet b;
  b.absolute = {j.at("sigma_p_rad_fs"), j.at("sigma_e_rad_fs"), j.at("sigma_phi_rad_fs"),
                j.at("sigma_psi_rad_fs")};
  b.normalized = {j.at("sigma_p_normalized"), j.at("sigma_e_normalized"),
                  j.at("sigma_phi_normalized"), j.at("sigma_psi_normalized")};
  b.output_sigma = j.at("output_sigma_rad_fs");
  b.length_spdc_um = j.at("length_spdc_um");
  b.length_sfc_um = j.at("length_sfc_um");
  return b;
}

json filter_to_json(const PairFilter& f) {
  return json{{"band1_nm", {f.band1.lo_nm, f.band1.hi_nm}},
              {"band2_nm", {f.band2.lo_nm, f.band2.hi_nm}},
              {"full_window", f.full_window}};
}

PairFilter filter_from_json(const json& j) {
  PairFilter f;
  f.band1 = {j.at("band1_nm").at(0), j.at("band1_nm").at(1)};
  f.band2 = {j.at("band2_nm").at(0), j.at("band2_nm").at(1)};
  f.full_window = j.at("full_window");
  return f;
}

json metrics_to_json(const MetricsReport& m) {
  json j{{"purity", m.purity},
         {"schmidt_number", m.schmidt_number},
         {"indistinguishability", m.indistinguishability},
         {"heralding_efficiency", m.heralding_efficiency},
         {"conversion_efficiency", m.conversion_efficiency},
         {"pair_pass_probability", m.pair_pass_probability}};
  if (m.filter) j["filter"] = filter_to_json(*m.filter);
  return j;
}

MetricsReport metrics_from_json(const json& j) {
  MetricsReport m;
  m.purity = j.at("purity");
  m.schmidt_number = j.at("schmidt_number");
  m.indistinguishability = j.at("indistinguishability");
  m.heralding_efficiency = j.at("heralding_efficiency");
  m.conversion_efficiency = j.at("conversion_efficiency");
  m.pair_pass_probability = j.at("pair_pass_probability");
  if (j.contains("filter")) m.filter = filter_from_json(j.at("filter"));
  return m;
}

json sweep_point_to_json(const SweepResult& r) {
  json j{{"lambda_deg_nm", r.lambda_deg_nm}, {"error", r.error}};
  if (r.ok()) {
    j["config"] = r.config_id;
    j["eta"] = r.best.eta;
    j["metrics"] = metrics_to_json(r.best.metrics);
    j["bandwidths"] = bandwidths_to_json(r.best.bandwidths);
    j["poling_spdc_um"] = r.best.poling_spdc.period_um;
    j["poling_spdc_sign"] = r.best.poling_spdc.sign;
    j["poling_sfc_um"] = r.best.poling_sfc.period_um;
    j["poling_sfc_sign"] = r.best.poling_sfc.sign;
    j["output_band_rad_fs"] = {r.output_band.first, r.output_band.second};
    if (r.conventional) {
      const auto& c = *r.conventional;
      j["conventional"] = json{{"purity_unfiltered", c.purity_unfiltered},
                               {"purity_filtered", c.purity_filtered},
                               {"pair_pass_filtered", c.pair_pass_filtered},
                               {"heralding_filtered", c.heralding_filtered},
                               {"indistinguishability_filtered", c.indistinguishability_filtered},
                               {"sigma_p_rad_fs", c.sigma_p},
                               {"length_um", c.length_um},
                               {"filter", filter_to_json(c.filter)}};
    }
  }
  return j;
}

SweepResult sweep_point_from_json(const json& j) {
  SweepResult r;
  r.lambda_deg_nm = j.at("lambda_deg_nm");
  r.error = j.at("error");
  if (!r.ok()) return r;
  r.config_id = j.at("config");
  r.best.eta = j.at("eta");
  r.best.metrics = metrics_from_json(j.at("metrics"));
  r.best.bandwidths = bandwidths_from_json(j.at("bandwidths"));
  r.best.poling_spdc.period_um = j.at("poling_spdc_um");
  r.best.poling_spdc.sign = j.at("poling_spdc_sign");
  r.best.poling_sfc.period_um = j.at("poling_sfc_um");
  r.best.poling_sfc.sign = j.at("poling_sfc_sign");
  r.output_band = {j.at("output_band_rad_fs").at(0), j.at("output_band_rad_fs").at(1)};
  if (j.contains("conventional")) {
    ConventionalBaseline c;
    const json& cj = j.at("conventional");
    c.purity_unfiltered = cj.at("purity_unfiltered");
    c.purity_filtered = cj.at("purity_filtered");
    c.pair_pass_filtered = cj.at("pair_pass_filtered");
    c.heralding_filtered = cj.at("heralding_filtered");
    c.indistinguishability_filtered = cj.at("indistinguishability_filtered");
    c.sigma_p = cj.at("sigma_p_rad_fs");
    c.length_um = cj.at("length_um");
    c.filter = filter_from_json(cj.at("filter"));
    r.conventional = c;
  }
  return r;
}

void dump_amplitude(const GlobalOptions& g, const JointAmplitude& f, const std::string& stem) {
  std::ofstream csv(g.out_path(stem + ".csv"));
  csv << "axis1_nm,axis2_nm,value\n";
  for (int i = 0; i < f.grid.points; ++i) {
    const double l1 = units::nm_from_omega(f.grid.axis1(i));
    for (int j = 0; j < f.grid.points; ++j) {
      csv << fmt(l1) << "," << fmt(units::nm_from_omega(f.grid.axis2(j))) << ","
          << fmt(f.values(i, j).real()) << "\n";
    }
  }
  json meta{{"grid",
             {{"center1_rad_fs", f.grid.center1},
              {"center2_rad_fs", f.grid.center2},
              {"half1_rad_fs", f.grid.half1},
              {"half2_rad_fs", f.grid.half2},
              {"points", f.grid.points}}},
            {"kind", static_cast<int>(f.kind)},
            {"normalization", f.normalization}};
  std::ofstream(g.out_path(stem + ".meta.json")) << meta.dump(2) << "\n";
}

struct AnalyzeArgs {
  double lambda_deg = 0.0;
  int config = 0;  // 0 = select automatically
  bool dump_jsa = false;
};

int cmd_analyze(const GlobalOptions& g, const AnalyzeArgs& args) {
  const auto& crystal = g.dispersion();
  const PmfKind pmf = pmf_kind_from_string(g.pmf);
  const OptimizerOptions opts = g.optimizer_options();

  SweepResult result;
  if (args.config > 0) {
    if (args.lambda_deg < crystal.fc_floor_nm() - 1e-9) {
      std::ostringstream msg;
      msg << "lambda_deg " << args.lambda_deg << " nm below the frequency-converted limit "
          << crystal.fc_floor_nm() << " nm";
      throw Error(ErrorKind::BelowCutoff, msg.str());
    }
    result.lambda_deg_nm = args.lambda_deg;
    result.config_id = args.config;
    result.best = optimize_bandwidths(crystal, args.lambda_deg, args.config, pmf, {}, opts);
    result.conventional = conventional_baseline(crystal, args.lambda_deg, pmf, {}, opts);
    result.output_band =
        feasible_output_bandwidths(crystal, args.lambda_deg, args.config, pmf, {});
  } else {
    result = select_configuration(crystal, args.lambda_deg, pmf, {}, opts);
  }

  json report = sweep_point_to_json(result);
  report["crystal"] = g.crystal;
  report["pmf"] = to_string(pmf);
  report["grid_points"] = opts.final_points;
  report["seed"] = g.seed;
  report["config_roman"] = config_by_id(crystal.id(), result.config_id).roman();

  if (args.dump_jsa) {
    g.ensure_out_dir();
    const FrequencyRelations rel(args.lambda_deg);
    const auto& config = config_by_id(crystal.id(), result.config_id);
    const FcAmplitudes amps = build_fc_amplitudes(
        crystal, spdc_geometry(crystal, config, rel), sfc_geometry(crystal, config, rel),
        result.best.bandwidths.absolute, pmf, opts.final_points);
    dump_amplitude(g, amps.f_jsa, "jsa");
    dump_amplitude(g, amps.f_jca, "jca");
    dump_amplitude(g, amps.f_eff, "jsa_effective");
  }

  const std::string text = report.dump(2) + "\n";
  std::fputs(text.c_str(), stdout);
  if (!g.out_dir.empty()) {
    g.ensure_out_dir();
    std::ofstream(g.out_path("analyze_" + g.crystal + ".json")) << text;
  }
  return kExitOk;
}

struct SweepArgs {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int points = 0;
  std::string pmf = "both";
  bool fresh = false;  // ignore an existing checkpoint
};

std::string sweep_csv_header() {
  return "lambda_deg_nm,config,purity,indistinguishability,heralding_efficiency,"
         "conversion_efficiency,sigma_p_norm,sigma_phi_norm,sigma_e_norm,sigma_psi_norm,"
         "sigma_p_rad_fs,sigma_phi_rad_fs,sigma_e_rad_fs,sigma_psi_rad_fs,"
         "poling_spdc_um,poling_sfc_um,sigma_out_min_rad_fs,sigma_out_max_rad_fs,"
         "conv_purity,conv_pair_pass,conv_heralding,error\n";
}

std::string sweep_csv_row(const SweepResult& r) {
  std::ostringstream row;
  row << fmt(r.lambda_deg_nm) << ",";
  if (r.ok()) {
    const auto& b = r.best.bandwidths;
    const auto& m = r.best.metrics;
    row << r.config_id << "," << fmt(m.purity) << "," << fmt(m.indistinguishability) << ","
        << fmt(m.heralding_efficiency) << "," << fmt(m.conversion_efficiency) << ","
        << fmt(b.normalized.sigma_p) << "," << fmt(b.normalized.sigma_phi) << ","
        << fmt(b.normalized.sigma_e) << "," << fmt(b.normalized.sigma_psi) << ","
        << fmt(b.absolute.sigma_p) << "," << fmt(b.absolute.sigma_phi) << ","
        << fmt(b.absolute.sigma_e) << "," << fmt(b.absolute.sigma_psi) << ","
        << fmt(r.best.poling_spdc.period_um) << "," << fmt(r.best.poling_sfc.period_um) << ","
        << fmt(r.output_band.first) << "," << fmt(r.output_band.second) << ",";
    if (r.conventional) {
      row << fmt(r.conventional->purity_unfiltered) << ","
          << fmt(r.conventional->pair_pass_filtered) << ","
          << fmt(r.conventional->heralding_filtered);
    } else {
      row << ",,";
    }
    row << ",";
  } else {
    row << ",,,,,,,,,,,,,,,,,,,," << "\"" << r.error << "\"";
  }
  row << "\n";
  return row.str();
}

// Figure packs named after the panels they reproduce: fig6/fig8 for KTP,
// fig7/fig9 for LN, fig10 purity closeups, fig11 conversion comparison.
void write_figure_pack(const GlobalOptions& g, Crystal crystal,
                       const std::map<std::string, std::vector<SweepResult>>& runs) {
  const bool ktp = crystal == Crystal::Ktp;
  if (!ktp && crystal != Crystal::Ln) return;
  const std::string main_fig = ktp ? "fig6" : "fig7";
  const std::string gauss_fig = ktp ? "fig8" : "fig9";
  const std::string zoom_fig = ktp ? "fig10a" : "fig10b";
  const auto& sinc_run = runs.count("sinc") ? runs.at("sinc") : std::vector<SweepResult>{};
  const auto& gauss_run =
      runs.count("gaussian") ? runs.at("gaussian") : std::vector<SweepResult>{};

  auto find_same = [](const std::vector<SweepResult>& v, double l) -> const SweepResult* {
    for (const auto& r : v)
      if (std::abs(r.lambda_deg_nm - l) < 1e-9 && r.ok()) return &r;
    return nullptr;
  };

  std::vector<double> lambdas;
  for (const auto& r : sinc_run) lambdas.push_back(r.lambda_deg_nm);
  if (lambdas.empty())
    for (const auto& r : gauss_run) lambdas.push_back(r.lambda_deg_nm);

  {
    std::ofstream a(g.out_path(main_fig + "a.csv"));
    std::ofstream b(g.out_path(main_fig + "b.csv"));
    std::ofstream c(g.out_path(main_fig + "c.csv"));
    std::ofstream z(g.out_path(zoom_fig + ".csv"));
    a << "lambda_deg_nm,P_gaussian,P_sinc,P_conventional\n";
    b << "lambda_deg_nm,I_gaussian,I_sinc,I_conventional\n";
    c << "lambda_deg_nm,H_gaussian,H_sinc,H_conventional\n";
    z << "lambda_deg_nm,P_gaussian,P_sinc\n";
    for (double l : lambdas) {
      const SweepResult* s = find_same(sinc_run, l);
      const SweepResult* q = find_same(gauss_run, l);
      auto field = [&](const SweepResult* r, auto get) {
        return r ? fmt(get(*r)) : std::string();
      };
      const auto conv = s && s->conventional ? s->conventional
                        : (q ? q->conventional : std::optional<ConventionalBaseline>{});
      a << fmt(l) << "," << field(q, [](const SweepResult& r) { return r.best.metrics.purity; })
        << "," << field(s, [](const SweepResult& r) { return r.best.metrics.purity; }) << ","
        << (conv ? fmt(conv->purity_filtered) : "") << "\n";
      b << fmt(l) << ","
        << field(q, [](const SweepResult& r) { return r.best.metrics.indistinguishability; })
        << ","
        << field(s, [](const SweepResult& r) { return r.best.metrics.indistinguishability; })
        << "," << (conv ? fmt(conv->indistinguishability_filtered) : "") << "\n";
      c << fmt(l) << ","
        << field(q, [](const SweepResult& r) { return r.best.metrics.heralding_efficiency; })
        << ","
        << field(s, [](const SweepResult& r) { return r.best.metrics.heralding_efficiency; })
        << "," << (conv ? fmt(conv->heralding_filtered) : "") << "\n";
      z << fmt(l) << "," << field(q, [](const SweepResult& r) { return r.best.metrics.purity; })
        << "," << field(s, [](const SweepResult& r) { return r.best.metrics.purity; }) << "\n";
    }
  }

  auto write_params = [&](const std::vector<SweepResult>& run, const std::string& prefix,
                          char first_panel) {
    std::ofstream d(g.out_path(prefix + std::string(1, first_panel) + ".csv"));
    std::ofstream e(g.out_path(prefix + std::string(1, char(first_panel + 1)) + ".csv"));
    std::ofstream f(g.out_path(prefix + std::string(1, char(first_panel + 2)) + ".csv"));
    d << "lambda_deg_nm,config,sigma_p_norm,sigma_phi_norm,sigma_e_norm,sigma_psi_norm\n";
    e << "lambda_deg_nm,sigma_out_min_rad_fs,sigma_out_max_rad_fs\n";
    f << "lambda_deg_nm,config,poling_spdc_um,poling_sfc_um\n";
    for (const auto& r : run) {
      if (!r.ok()) continue;
      const auto& b = r.best.bandwidths;
      d << fmt(r.lambda_deg_nm) << "," << r.config_id << "," << fmt(b.normalized.sigma_p) << ","
        << fmt(b.normalized.sigma_phi) << "," << fmt(b.normalized.sigma_e) << ","
        << fmt(b.normalized.sigma_psi) << "\n";
      e << fmt(r.lambda_deg_nm) << "," << fmt(r.output_band.first) << ","
        << fmt(r.output_band.second) << "\n";
      f << fmt(r.lambda_deg_nm) << "," << r.config_id << "," << fmt(r.best.poling_spdc.period_um)
        << "," << fmt(r.best.poling_sfc.period_um) << "\n";
    }
  };
  if (!sinc_run.empty()) write_params(sinc_run, main_fig, 'd');
  if (!gauss_run.empty()) write_params(gauss_run, gauss_fig, 'a');

  // conversion-efficiency comparison: sinc and gaussian panels
  auto write_conversion = [&](const std::vector<SweepResult>& run, const std::string& name) {
    if (run.empty()) return;
    std::ofstream out(g.out_path(name));
    out << "lambda_deg_nm,eta_conv,conventional_pair_pass\n";
    for (const auto& r : run) {
      if (!r.ok()) continue;
      out << fmt(r.lambda_deg_nm) << "," << fmt(r.best.metrics.conversion_efficiency) << ","
          << (r.conventional ? fmt(r.conventional->pair_pass_filtered) : "") << "\n";
    }
  };
  write_conversion(sinc_run, std::string("fig11") + (ktp ? "a" : "b") + ".csv");
  write_conversion(gauss_run, std::string("fig11") + (ktp ? "c" : "d") + ".csv");
}

int cmd_sweep(const GlobalOptions& g, SweepArgs args) {
  const auto& crystal = g.dispersion();
  if (args.lambda_min == 0.0 || args.lambda_max == 0.0 || args.points == 0) {
    if (crystal.id() == Crystal::Ktp) {
      args.lambda_min = args.lambda_min == 0.0 ? 466.0 : args.lambda_min;
      args.lambda_max = args.lambda_max == 0.0 ? 1500.0 : args.lambda_max;
      args.points = args.points == 0 ? 20 : args.points;
    } else {
      args.lambda_min = args.lambda_min == 0.0 ? 534.0 : args.lambda_min;
      args.lambda_max = args.lambda_max == 0.0 ? 1600.0 : args.lambda_max;
      args.points = args.points == 0 ? 15 : args.points;
    }
  }
  const std::vector<double> lambdas =
      sweep_lambdas(args.lambda_min, args.lambda_max, args.points);
  std::vector<std::string> kinds;
  if (args.pmf == "both") {
    kinds = {"gaussian", "sinc"};
  } else {
    kinds = {to_string(pmf_kind_from_string(args.pmf))};
  }

  g.ensure_out_dir();
  const std::string checkpoint_path = g.out_path("sweep_" + g.crystal + "_checkpoint.json");
  const json run_key{{"crystal", g.crystal},
                     {"lambda_min", args.lambda_min},
                     {"lambda_max", args.lambda_max},
                     {"points", args.points},
                     {"grid", g.optimizer_options().final_points},
                     {"search", g.search_points},
                     {"seed", g.seed}};

  json state{{"key", run_key}, {"results", json::object()}};
  if (!args.fresh && fs::exists(checkpoint_path)) {
    try {
      json loaded = json::parse(std::ifstream(checkpoint_path));
      if (loaded.at("key") == run_key) {
        state = loaded;
        std::fprintf(stderr, "resuming from %s\n", checkpoint_path.c_str());
      }
    } catch (...) {
      // unreadable checkpoint: start over
    }
  }

  const OptimizerOptions opts = g.optimizer_options();
  std::map<std::string, std::vector<SweepResult>> runs;
  int done = 0, ok_count = 0, total = 0;
  for (const auto& kind_name : kinds) {
    const PmfKind kind = pmf_kind_from_string(kind_name);
    std::vector<SweepResult> results;
    for (double lambda : lambdas) {
      ++total;
      const std::string key = kind_name + "/" + fmt(lambda);
      if (state["results"].contains(key)) {
        results.push_back(sweep_point_from_json(state["results"][key]));
      } else {
        SweepResult point;
        try {
          point = select_configuration(crystal, lambda, kind, {}, opts);
        } catch (const Error& e) {
          point.lambda_deg_nm = lambda;
          point.error = e.what();
        }
        state["results"][key] = sweep_point_to_json(point);
        std::ofstream(checkpoint_path) << state.dump() << "\n";
        results.push_back(std::move(point));
      }
      const auto& r = results.back();
      if (r.ok()) ++ok_count;
      ++done;
      std::fprintf(stderr, "[%d/%zu] %s %s nm %s\n", done,
                   lambdas.size() * kinds.size(), kind_name.c_str(), fmt(lambda).c_str(),
                   r.ok() ? "ok" : "failed");
    }

    std::ofstream csv(g.out_path("sweep_" + g.crystal + "_" + kind_name + ".csv"));
    csv << sweep_csv_header();
    for (const auto& r : results) csv << sweep_csv_row(r);
    runs[kind_name] = std::move(results);
  }

  write_figure_pack(g, crystal.id(), runs);

  json sidecar{{"key", run_key},
               {"constraints",
                {{"ratio_max", OptimizationConstraints{}.ratio_max},
                 {"normalized_box", {OptimizationConstraints{}.normalized_lo,
                                     OptimizationConstraints{}.normalized_hi}},
                 {"pulse_fs", {OptimizationConstraints{}.pulse_min_fs,
                               OptimizationConstraints{}.pulse_max_fs}},
                 {"length_um", {OptimizationConstraints{}.length_min_um,
                                OptimizationConstraints{}.length_max_um}}}},
               {"points_total", total},
               {"points_ok", ok_count},
               {"results", state["results"]}};
  std::ofstream(g.out_path("sweep_" + g.crystal + ".json")) << sidecar.dump(2) << "\n";

  return ok_count * 10 >= total * 9 ? kExitOk : kExitPartialSweep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frequency-converted pair-source designer"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--crystal", g.crystal, "ktp, ln, or mgln")->capture_default_str();
  app.add_option("--pmf", g.pmf, "sinc or gaussian")->capture_default_str();
  app.add_option("--grid-points", g.grid_points, "final evaluation grid size")
      ->capture_default_str();
  app.add_option("--search-points", g.search_points, "optimizer search grid size")
      ->capture_default_str();
  app.add_option("--seed", g.seed, "recorded in outputs; runs are deterministic")
      ->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "directory for generated files");
  app.add_option("--crystal-data", g.crystal_data, "JSON file of Sellmeier coefficient sets");
  app.set_config("--config-file");

  auto* configs_cmd = app.add_subcommand("configs", "print the phase-matching catalog");

  GvmArgs gvm_args;
  auto* gvm_cmd = app.add_subcommand("gvm", "trace group-velocity-matching loci as CSV");
  gvm_cmd->add_option("--lambda-min", gvm_args.lambda_min, "signal scan start, nm");
  gvm_cmd->add_option("--lambda-max", gvm_args.lambda_max, "signal scan end, nm");
  gvm_cmd->add_option("--step", gvm_args.step, "scan step, nm")->capture_default_str();

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "optimize one operating point");
  analyze_cmd->add_option("--lambda-deg", analyze_args.lambda_deg, "degeneracy wavelength, nm")
      ->required();
  analyze_cmd->add_option("--config", analyze_args.config, "force a catalog row (1-8)");
  analyze_cmd->add_flag("--dump-jsa", analyze_args.dump_jsa,
                        "write the three amplitudes next to the report");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "optimize across a wavelength range");
  sweep_cmd->add_option("--lambda-min", sweep_args.lambda_min, "sweep start, nm");
  sweep_cmd->add_option("--lambda-max", sweep_args.lambda_max, "sweep end, nm");
  sweep_cmd->add_option("--points", sweep_args.points, "number of sweep points");
  sweep_cmd->add_option("--sweep-pmf", sweep_args.pmf, "sinc, gaussian, or both")
      ->capture_default_str();
  sweep_cmd->add_flag("--fresh", sweep_args.fresh, "ignore an existing checkpoint");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitInput;
  }

  try {
    if (!g.crystal_data.empty()) CrystalDispersion::load_coefficients(g.crystal_data);
    crystal_from_string(g.crystal);  // validate early
    if (configs_cmd->parsed()) return cmd_configs(g);
    if (gvm_cmd->parsed()) return cmd_gvm(g, gvm_args);
    if (analyze_cmd->parsed()) return cmd_analyze(g, analyze_args);
    if (sweep_cmd->parsed()) return cmd_sweep(g, sweep_args);
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
    return e.category() == ErrorCategory::Physics ? kExitPhysics : kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitOk;
}
