#ifndef FCSPDC_OPTIMIZER_HPP
#define FCSPDC_OPTIMIZER_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fcspdc/metrics.hpp"
#include "fcspdc/spectra.hpp"

namespace fcspdc {

struct OptimizationConstraints {
  double ratio_max = 2.0;       // sigma_p <= 2 sigma_e etc., both directions
  double normalized_lo = 0.1;   // bandwidths normalized to the output bandwidth
  double normalized_hi = 6.0;
  double pulse_min_fs = 5.0;    // transform-limited pump/escort duration box
  double pulse_max_fs = 1e6;    // 1 ns
  double length_min_um = 1000.0;
  double length_max_um = 30000.0;

  double sigma_env_min() const;  // envelope bounds implied by the pulse box
  double sigma_env_max() const;
};

struct OptimizerOptions {
  int search_points = 96;   // grid size while searching
  int final_points = 256;   // grid size for the reported metrics
  int multi_start = 5;      // Nelder-Mead restarts from the best scan points
  int refine_evals = 60;    // objective budget per restart
  unsigned seed = 0;        // recorded for reproducibility; search is deterministic
};

/// Absolute bandwidths with their normalized-to-output duals and the implied
/// poling-region lengths.
struct BandwidthSet {
  FcBandwidths absolute;    // rad/fs
  FcBandwidths normalized;  // divided by the realized output bandwidth
  double output_sigma = 0.0;  // realized output bandwidth of f_eff along w_s, rad/fs
  double length_spdc_um = 0.0;
  double length_sfc_um = 0.0;
};

struct OptimizationResult {
  BandwidthSet bandwidths;
  MetricsReport metrics;
  double eta = 0.0;  // purity x indistinguishability at the final evaluation
  PolingSolution poling_spdc;
  PolingSolution poling_sfc;
};

/// Realized output bandwidth: 1/e^2 intensity marginal half-width of the
/// amplitude along axis 1, expressed as the equivalent Gaussian amplitude
/// standard deviation.
double output_bandwidth_sigma(const JointAmplitude& f);

/// Maximizes eta = P x I over the four bandwidths for a fixed configuration.
/// Deterministic: coarse log-spaced scan inside the feasible box followed by
/// Nelder-Mead refinement from the best scan points.
OptimizationResult optimize_bandwidths(const CrystalDispersion& crystal, double lambda_deg_nm,
                                       int config_id, PmfKind pmf,
                                       const OptimizationConstraints& constraints = {},
                                       const OptimizerOptions& options = {});

/// Conventional degenerate pair source at the same wavelength, used as the
/// comparison column: pump bandwidth and region length chosen to maximize
/// purity, then filtered to 99% purity.
struct ConventionalBaseline {
  double purity_unfiltered = 0.0;
  double purity_filtered = 0.0;
  double indistinguishability_filtered = 0.0;
  double pair_pass_filtered = 0.0;
  double heralding_filtered = 0.0;
  double sigma_p = 0.0;
  double length_um = 0.0;
  PairFilter filter;
};

/// Empty when the degenerate pump (lambda_deg / 2) falls below the crystal's
/// absorption cutoff.
std::optional<ConventionalBaseline> conventional_baseline(
    const CrystalDispersion& crystal, double lambda_deg_nm, PmfKind pmf,
    const OptimizationConstraints& constraints = {}, const OptimizerOptions& options = {});

/// Output bandwidths attainable with both region lengths inside the length
/// box and every bandwidth constraint satisfied.
std::pair<double, double> feasible_output_bandwidths(
    const CrystalDispersion& crystal, double lambda_deg_nm, int config_id, PmfKind pmf,
    const OptimizationConstraints& constraints = {});

struct SweepResult {
  double lambda_deg_nm = 0.0;
  int config_id = 0;
  OptimizationResult best;
  std::optional<ConventionalBaseline> conventional;
  std::pair<double, double> output_band{0.0, 0.0};
  std::string error;  // nonempty when this point failed

  bool ok() const { return error.empty(); }
};

/// Runs optimize_bandwidths for every admissible configuration and keeps the
/// argmax by eta (ties to the lower id). Throws BelowCutoff when lambda_deg
/// is unreachable for the crystal.
SweepResult select_configuration(const CrystalDispersion& crystal, double lambda_deg_nm,
                                 PmfKind pmf, const OptimizationConstraints& constraints = {},
                                 const OptimizerOptions& options = {});

/// Wavelength sweep; per-point failures are recorded in the result list and
/// never abort the remaining points. `progress` (optional) is invoked after
/// each point.
std::vector<SweepResult> sweep(const CrystalDispersion& crystal,
                               const std::vector<double>& lambdas_nm, PmfKind pmf,
                               const OptimizationConstraints& constraints = {},
                               const OptimizerOptions& options = {},
                               const std::function<void(const SweepResult&)>& progress = {});

std::vector<double> sweep_lambdas(double lo_nm, double hi_nm, int count);

}  // namespace fcspdc

#endif
