#include "fcspdc/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "fcspdc/units.hpp"

namespace fcspdc {

double OptimizationConstraints::sigma_env_min() const {
  return units::sigma_from_pulse_duration(pulse_max_fs);
}

double OptimizationConstraints::sigma_env_max() const {
  return units::sigma_from_pulse_duration(pulse_min_fs);
}

double output_bandwidth_sigma(const JointAmplitude& f) {
  const Eigen::VectorXd marginal = f.values.cwiseAbs2().rowwise().sum();
  const double peak = marginal.maxCoeff();
  if (!(peak > 0.0)) throw Error(ErrorKind::ZeroAmplitude, "output marginal is zero");
  int ipk = 0;
  marginal.maxCoeff(&ipk);
  const double thr = peak * std::exp(-2.0);
  const int n = static_cast<int>(marginal.size());
  auto crossing = [&](int dir) {
    for (int j = ipk + dir; j >= 0 && j < n; j += dir) {
      if (marginal(j) < thr) {
        const double x1 = f.grid.axis1(j - dir), x2 = f.grid.axis1(j);
        const double y1 = marginal(j - dir), y2 = marginal(j);
        return std::abs(x1 + (thr - y1) * (x2 - x1) / (y2 - y1) - f.grid.axis1(ipk));
      }
    }
    return std::abs(f.grid.axis1(dir > 0 ? n - 1 : 0) - f.grid.axis1(ipk));
  };
  const double half_width = 0.5 * (crossing(+1) + crossing(-1));
  // 1/e^2 intensity half-width of a Gaussian is sqrt(2) sigma.
  return half_width / std::sqrt(2.0);
}

namespace {

struct Candidate {
  FcBandwidths bw;
  double eta = -1.0;
};

struct EvalContext {
  const CrystalDispersion* crystal;
  LegGeometry spdc;
  LegGeometry sfc;
  PmfKind pmf;
  const OptimizationConstraints* constraints;
  int points;
};

bool ratios_ok(const FcBandwidths& bw, const OptimizationConstraints& c) {
  return bw.sigma_p <= c.ratio_max * bw.sigma_e && bw.sigma_e <= c.ratio_max * bw.sigma_p &&
         bw.sigma_phi <= c.ratio_max * bw.sigma_psi && bw.sigma_psi <= c.ratio_max * bw.sigma_phi;
}

bool boxes_ok(const FcBandwidths& bw, const EvalContext& ctx) {
  const auto& c = *ctx.constraints;
  if (!(bw.sigma_p >= c.sigma_env_min() && bw.sigma_p <= c.sigma_env_max())) return false;
  if (!(bw.sigma_e >= c.sigma_env_min() && bw.sigma_e <= c.sigma_env_max())) return false;
  const double lp = length_from_pmf_sigma(ctx.spdc, bw.sigma_phi, ctx.pmf);
  const double ls = length_from_pmf_sigma(ctx.sfc, bw.sigma_psi, ctx.pmf);
  if (!(lp >= c.length_min_um && lp <= c.length_max_um)) return false;
  if (!(ls >= c.length_min_um && ls <= c.length_max_um)) return false;
  return true;
}

// eta = P x I, or negative when infeasible. The normalized-bandwidth box is
// checked against the realized output bandwidth after the amplitudes are
// built, before the metric evaluation.
double evaluate(const EvalContext& ctx, const FcBandwidths& bw,
                FcAmplitudes* keep_amplitudes = nullptr, double* keep_output = nullptr) {
  if (!(bw.sigma_p > 0.0 && bw.sigma_e > 0.0 && bw.sigma_phi > 0.0 && bw.sigma_psi > 0.0))
    return -1.0;
  if (!ratios_ok(bw, *ctx.constraints) || !boxes_ok(bw, ctx)) return -1.0;
  try {
    FcAmplitudes amps =
        build_fc_amplitudes(*ctx.crystal, ctx.spdc, ctx.sfc, bw, ctx.pmf, ctx.points);
    if (!amps.f_eff.values.allFinite()) return -1.0;
    const double total = amps.f_eff.squared_norm();
    if (!(total > 0.0)) return -1.0;

    const double w_out = output_bandwidth_sigma(amps.f_eff);
    const auto& c = *ctx.constraints;
    for (double s : {bw.sigma_p, bw.sigma_e, bw.sigma_phi, bw.sigma_psi}) {
      const double normalized = s / w_out;
      if (normalized < c.normalized_lo || normalized > c.normalized_hi) return -1.0;
    }

    const double p = purity_trace(amps.f_eff);
    const double ind = indistinguishability(amps.f_eff);
    if (!std::isfinite(p) || !std::isfinite(ind)) return -1.0;
    if (keep_amplitudes) *keep_amplitudes = std::move(amps);
    if (keep_output) *keep_output = w_out;
    return p * ind;
  } catch (const Error&) {
    return -1.0;
  }
}

std::array<double, 4> to_log(const FcBandwidths& bw) {
  return {std::log(bw.sigma_p), std::log(bw.sigma_e), std::log(bw.sigma_phi),
          std::log(bw.sigma_psi)};
}

FcBandwidths from_log(const std::array<double, 4>& x) {
  return {std::exp(x[0]), std::exp(x[1]), std::exp(x[2]), std::exp(x[3])};
}

// Nelder-Mead in 4-d log space with infeasible points scored -1.
Candidate nelder_mead(const EvalContext& ctx, const FcBandwidths& start, int budget) {
  using Point = std::array<double, 4>;
  struct Vertex {
    Point x;
    double f;
  };
  int evals = 0;
  auto score = [&](const Point& p) {
    ++evals;
    return evaluate(ctx, from_log(p));
  };

  const Point x0 = to_log(start);
  std::array<Vertex, 5> simplex;
  simplex[0] = {x0, score(x0)};
  for (int k = 0; k < 4; ++k) {
    Point p = x0;
    p[k] += 0.25;
    simplex[k + 1] = {p, score(p)};
  }
  auto by_f = [](const Vertex& a, const Vertex& b) { return a.f > b.f; };

  while (evals < budget) {
    std::sort(simplex.begin(), simplex.end(), by_f);
    Point centroid{};
    for (int k = 0; k < 4; ++k)
      for (int d = 0; d < 4; ++d) centroid[d] += simplex[k].x[d] / 4.0;

    auto blend = [&](double t) {
      Point p;
      for (int d = 0; d < 4; ++d) p[d] = centroid[d] + t * (centroid[d] - simplex[4].x[d]);
      return p;
    };
    const Point refl = blend(1.0);
    const double f_refl = score(refl);
    if (f_refl > simplex[0].f) {
      const Point exp_p = blend(2.0);
      const double f_exp = score(exp_p);
      simplex[4] = f_exp > f_refl ? Vertex{exp_p, f_exp} : Vertex{refl, f_refl};
    } else if (f_refl > simplex[3].f) {
      simplex[4] = {refl, f_refl};
    } else {
      const Point con = blend(-0.5);
      const double f_con = score(con);
      if (f_con > simplex[4].f) {
        simplex[4] = {con, f_con};
      } else {
        for (int k = 1; k < 5; ++k) {
          for (int d = 0; d < 4; ++d)
            simplex[k].x[d] = 0.5 * (simplex[k].x[d] + simplex[0].x[d]);
          simplex[k].f = score(simplex[k].x);
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_f);
  return {from_log(simplex[0].x), simplex[0].f};
}

}  // namespace

OptimizationResult optimize_bandwidths(const CrystalDispersion& crystal, double lambda_deg_nm,
                                       int config_id, PmfKind pmf,
                                       const OptimizationConstraints& constraints,
                                       const OptimizerOptions& options) {
  const PhaseMatchConfig& config = config_by_id(crystal.id(), config_id);
  const FrequencyRelations rel(lambda_deg_nm);

  EvalContext ctx;
  ctx.crystal = &crystal;
  ctx.spdc = spdc_geometry(crystal, config, rel);
  ctx.sfc = sfc_geometry(crystal, config, rel);
  ctx.pmf = pmf;
  ctx.constraints = &constraints;
  ctx.points = options.search_points;

  // Envelope scan window: the pulse-duration box spans decades, but only
  // scales comparable to the PMF bandwidths can pass the normalized box, so
  // the scan is centered on the PMF window.
  const double phi_lo = pmf_sigma_from_length(ctx.spdc, constraints.length_max_um, pmf);
  const double phi_hi = pmf_sigma_from_length(ctx.spdc, constraints.length_min_um, pmf);
  const double psi_lo = pmf_sigma_from_length(ctx.sfc, constraints.length_max_um, pmf);
  const double psi_hi = pmf_sigma_from_length(ctx.sfc, constraints.length_min_um, pmf);
  const double env_lo = std::max(constraints.sigma_env_min(),
                                 0.05 * std::min(phi_lo, psi_lo));
  const double env_hi = std::min(constraints.sigma_env_max(),
                                 20.0 * std::max(phi_hi, psi_hi));
  if (!(env_lo < env_hi))
    throw Error(ErrorKind::InfeasibleConstraints, "bandwidth box is empty at this wavelength");

  constexpr int kScan = 7;
  const std::array<double, 3> ratio = {0.5, 1.0, 2.0};

  std::vector<Candidate> scan;
  for (int ip = 0; ip < kScan; ++ip) {
    const double sp = env_lo * std::pow(env_hi / env_lo, ip / double(kScan - 1));
    for (double re : ratio) {
      for (int iq = 0; iq < kScan; ++iq) {
        const double sphi = phi_lo * std::pow(phi_hi / phi_lo, iq / double(kScan - 1));
        for (double rq : ratio) {
          Candidate cand;
          cand.bw = {sp, sp * re, sphi, std::clamp(sphi * rq, psi_lo, psi_hi)};
          cand.eta = evaluate(ctx, cand.bw);
          if (cand.eta > 0.0) scan.push_back(cand);
        }
      }
    }
  }
  if (scan.empty())
    throw Error(ErrorKind::InfeasibleConstraints,
                "no feasible bandwidth candidate at this wavelength/configuration");

  std::sort(scan.begin(), scan.end(),
            [](const Candidate& a, const Candidate& b) { return a.eta > b.eta; });

  Candidate best = scan.front();
  const int starts = std::min<int>(options.multi_start, static_cast<int>(scan.size()));
  for (int s = 0; s < starts; ++s) {
    const Candidate refined = nelder_mead(ctx, scan[s].bw, options.refine_evals);
    if (refined.eta > best.eta) best = refined;
  }

  // Final evaluation on the reporting grid.
  ctx.points = options.final_points;
  FcAmplitudes amps;
  double w_out = 0.0;
  const double eta_final = evaluate(ctx, best.bw, &amps, &w_out);
  if (eta_final < 0.0)
    throw Error(ErrorKind::InfeasibleConstraints,
                "optimum infeasible at the reporting grid resolution");

  OptimizationResult result;
  result.bandwidths.absolute = best.bw;
  result.bandwidths.output_sigma = w_out;
  result.bandwidths.normalized = {best.bw.sigma_p / w_out, best.bw.sigma_e / w_out,
                                  best.bw.sigma_phi / w_out, best.bw.sigma_psi / w_out};
  result.bandwidths.length_spdc_um = length_from_pmf_sigma(ctx.spdc, best.bw.sigma_phi, pmf);
  result.bandwidths.length_sfc_um = length_from_pmf_sigma(ctx.sfc, best.bw.sigma_psi, pmf);
  result.poling_spdc = ctx.spdc.grating;
  result.poling_sfc = ctx.sfc.grating;
  result.metrics = evaluate_fc_metrics(amps);
  result.eta = result.metrics.purity * result.metrics.indistinguishability;
  return result;
}

namespace {

struct DegenerateContext {
  const CrystalDispersion* crystal;
  LegGeometry spdc;
  PmfKind pmf;
  const OptimizationConstraints* constraints;
  int points;
};

double evaluate_degenerate(const DegenerateContext& ctx, double sigma_p, double sigma_phi,
                           JointAmplitude* keep = nullptr) {
  const auto& c = *ctx.constraints;
  if (!(sigma_p >= c.sigma_env_min() && sigma_p <= c.sigma_env_max())) return -1.0;
  const double length = length_from_pmf_sigma(ctx.spdc, sigma_phi, ctx.pmf);
  if (!(length >= c.length_min_um && length <= c.length_max_um)) return -1.0;
  try {
    JointAmplitude f =
        build_degenerate_jsa(*ctx.crystal, ctx.spdc, sigma_p, sigma_phi, ctx.pmf, ctx.points);
    if (!f.values.allFinite() || !(f.squared_norm() > 0.0)) return -1.0;
    const double p = purity_trace(f);
    if (!std::isfinite(p)) return -1.0;
    if (keep) *keep = std::move(f);
    return p;
  } catch (const Error&) {
    return -1.0;
  }
}

}  // namespace

std::optional<ConventionalBaseline> conventional_baseline(
    const CrystalDispersion& crystal, double lambda_deg_nm, PmfKind pmf,
    const OptimizationConstraints& constraints, const OptimizerOptions& options) {
  // Degenerate pumping needs lambda_deg / 2 above the absorption edge.
  if (0.5 * lambda_deg_nm < crystal.absorption_cutoff_nm()) return std::nullopt;

  const Type2Triplet t = conventional_type2(crystal.id());
  PhaseMatchConfig config{};
  config.spdc_pump = t.pump;
  config.spdc_signal = t.signal;
  config.spdc_idler = t.idler;

  DegenerateContext ctx;
  ctx.crystal = &crystal;
  ctx.pmf = pmf;
  ctx.constraints = &constraints;
  ctx.points = options.search_points;

  // Degenerate "relations": pump at half the output wavelength.
  LegGeometry g;
  g.crystal = crystal.id();
  g.config = config;
  g.leg = ProcessLeg::Spdc;
  g.center1 = units::omega_from_nm(lambda_deg_nm);
  g.center2 = g.center1;
  const double kp = crystal.inverse_group_velocity(config.spdc_pump, 0.5 * lambda_deg_nm);
  g.grad1 = kp - crystal.inverse_group_velocity(config.spdc_signal, lambda_deg_nm);
  g.grad2 = kp - crystal.inverse_group_velocity(config.spdc_idler, lambda_deg_nm);
  g.grating = solve_poling_period(crystal, ProcessLeg::Spdc,
                                  {config.spdc_pump, 0.5 * lambda_deg_nm},
                                  {config.spdc_signal, lambda_deg_nm},
                                  {config.spdc_idler, lambda_deg_nm});
  ctx.spdc = g;

  const double phi_lo = pmf_sigma_from_length(g, constraints.length_max_um, pmf);
  const double phi_hi = pmf_sigma_from_length(g, constraints.length_min_um, pmf);
  const double env_lo = std::max(constraints.sigma_env_min(), 0.02 * phi_lo);
  const double env_hi = std::min(constraints.sigma_env_max(), 50.0 * phi_hi);

  constexpr int kScan = 9;
  double best_p = -1.0, best_sp = 0.0, best_sphi = 0.0;
  for (int i = 0; i < kScan; ++i) {
    const double sp = env_lo * std::pow(env_hi / env_lo, i / double(kScan - 1));
    for (int j = 0; j < kScan; ++j) {
      const double sphi = phi_lo * std::pow(phi_hi / phi_lo, j / double(kScan - 1));
      const double p = evaluate_degenerate(ctx, sp, sphi);
      if (p > best_p) {
        best_p = p;
        best_sp = sp;
        best_sphi = sphi;
      }
    }
  }
  if (best_p < 0.0) return std::nullopt;

  // local refinement, coordinate-wise log steps
  double step = 0.5;
  while (step > 1e-3) {
    bool improved = false;
    for (int d = 0; d < 2; ++d) {
      for (double dir : {+1.0, -1.0}) {
        const double sp = d == 0 ? best_sp * std::exp(dir * step) : best_sp;
        const double sphi = d == 1 ? best_sphi * std::exp(dir * step) : best_sphi;
        const double p = evaluate_degenerate(ctx, sp, sphi);
        if (p > best_p) {
          best_p = p;
          best_sp = sp;
          best_sphi = sphi;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  ctx.points = options.final_points;
  JointAmplitude f;
  const double p_final = evaluate_degenerate(ctx, best_sp, best_sphi, &f);
  if (p_final < 0.0) return std::nullopt;

  ConventionalBaseline out;
  out.purity_unfiltered = purity(f);
  out.sigma_p = best_sp;
  out.length_um = length_from_pmf_sigma(g, best_sphi, pmf);
  try {
    out.filter = minimal_filter_for_purity(f, 0.99);
    out.pair_pass_filtered = pair_pass_probability(f, out.filter);
    out.heralding_filtered = heralding_efficiency(f, out.filter);
    JointAmplitude filtered = apply_tophat_filter(f, out.filter.band1, out.filter.band2);
    out.purity_filtered = purity(filtered);
    out.indistinguishability_filtered = indistinguishability(filtered);
  } catch (const Error&) {
    // filter target unreachable on this grid; report unfiltered numbers
    out.filter = full_window_filter(f);
    out.pair_pass_filtered = 1.0;
    out.heralding_filtered = 1.0;
    out.purity_filtered = out.purity_unfiltered;
    out.indistinguishability_filtered = indistinguishability(f);
  }
  return out;
}

std::pair<double, double> feasible_output_bandwidths(const CrystalDispersion& crystal,
                                                     double lambda_deg_nm, int config_id,
                                                     PmfKind pmf,
                                                     const OptimizationConstraints& constraints) {
  const PhaseMatchConfig& config = config_by_id(crystal.id(), config_id);
  const FrequencyRelations rel(lambda_deg_nm);

  EvalContext ctx;
  ctx.crystal = &crystal;
  ctx.spdc = spdc_geometry(crystal, config, rel);
  ctx.sfc = sfc_geometry(crystal, config, rel);
  ctx.pmf = pmf;
  ctx.constraints = &constraints;
  ctx.points = 64;

  double lo = 0.0, hi = 0.0;
  bool any = false;
  constexpr int kLengthScan = 13;
  const std::array<double, 3> env_mult = {0.5, 1.0, 2.0};
  for (int i = 0; i < kLengthScan; ++i) {
    const double length =
        constraints.length_min_um *
        std::pow(constraints.length_max_um / constraints.length_min_um,
                 i / double(kLengthScan - 1));
    const double sphi = pmf_sigma_from_length(ctx.spdc, length, pmf);
    const double spsi = pmf_sigma_from_length(ctx.sfc, length, pmf);
    for (double m : env_mult) {
      FcBandwidths bw{m * sphi, m * spsi, sphi, spsi};
      bw.sigma_p = std::clamp(bw.sigma_p, constraints.sigma_env_min(), constraints.sigma_env_max());
      bw.sigma_e = std::clamp(bw.sigma_e, constraints.sigma_env_min(), constraints.sigma_env_max());
      FcAmplitudes amps;
      double w_out = 0.0;
      if (evaluate(ctx, bw, &amps, &w_out) < 0.0) continue;
      if (!any) {
        lo = hi = w_out;
        any = true;
      } else {
        lo = std::min(lo, w_out);
        hi = std::max(hi, w_out);
      }
    }
  }
  if (!any)
    throw Error(ErrorKind::InfeasibleConstraints,
                "no output bandwidth satisfies the constraint boxes here");
  return {lo, hi};
}

SweepResult select_configuration(const CrystalDispersion& crystal, double lambda_deg_nm,
                                 PmfKind pmf, const OptimizationConstraints& constraints,
                                 const OptimizerOptions& options) {
  if (lambda_deg_nm < crystal.fc_floor_nm() - 1e-9) {
    std::ostringstream msg;
    msg << to_string(crystal.id()) << ": lambda_deg " << lambda_deg_nm
        << " nm below the frequency-converted lower limit " << crystal.fc_floor_nm()
        << " nm (4/3 of the " << crystal.absorption_cutoff_nm() << " nm absorption edge gives "
        << 4.0 / 3.0 * crystal.absorption_cutoff_nm() << " nm)";
    throw Error(ErrorKind::BelowCutoff, msg.str());
  }

  SweepResult result;
  result.lambda_deg_nm = lambda_deg_nm;
  std::string last_error = "no admissible configuration";
  for (const PhaseMatchConfig& config : list_configs(crystal.id())) {
    try {
      OptimizationResult r =
          optimize_bandwidths(crystal, lambda_deg_nm, config.id, pmf, constraints, options);
      if (result.config_id == 0 || r.eta > result.best.eta) {
        result.config_id = config.id;
        result.best = std::move(r);
      }
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  if (result.config_id == 0) throw Error(ErrorKind::NoPhaseMatch, last_error);

  result.conventional = conventional_baseline(crystal, lambda_deg_nm, pmf, constraints, options);
  result.output_band =
      feasible_output_bandwidths(crystal, lambda_deg_nm, result.config_id, pmf, constraints);
  return result;
}

std::vector<SweepResult> sweep(const CrystalDispersion& crystal,
                               const std::vector<double>& lambdas_nm, PmfKind pmf,
                               const OptimizationConstraints& constraints,
                               const OptimizerOptions& options,
                               const std::function<void(const SweepResult&)>& progress) {
  std::vector<SweepResult> results;
  results.reserve(lambdas_nm.size());
  for (double lambda : lambdas_nm) {
    SweepResult point;
    try {
      point = select_configuration(crystal, lambda, pmf, constraints, options);
    } catch (const Error& e) {
      point = SweepResult{};
      point.lambda_deg_nm = lambda;
      point.error = e.what();
    }
    if (progress) progress(point);
    results.push_back(std::move(point));
  }
  return results;
}

std::vector<double> sweep_lambdas(double lo_nm, double hi_nm, int count) {
  if (!(lo_nm > 0.0) || !(hi_nm > lo_nm) || count < 2)
    throw Error(ErrorKind::InvalidArgument, "bad sweep range");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = lo_nm + (hi_nm - lo_nm) * i / double(count - 1);
  return out;
}

}  // namespace fcspdc
