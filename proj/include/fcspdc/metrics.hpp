#ifndef FCSPDC_METRICS_HPP
#define FCSPDC_METRICS_HPP

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "fcspdc/spectra.hpp"

namespace fcspdc {

/// Normalized Schmidt coefficients in descending order, sum of squares one.
struct SchmidtSpectrum {
  Eigen::VectorXd coefficients;

  double schmidt_number() const;  // K = 1 / sum lambda^4
};

/// Singular-value decomposition of the discretized amplitude.
SchmidtSpectrum schmidt_decompose(const JointAmplitude& f);

/// Heralded single-photon spectral purity P = 1/K from the Schmidt spectrum.
double purity(const JointAmplitude& f);

/// Same quantity through the Gram route Tr[(f f^H)^2] / Tr[f f^H]^2; avoids
/// the SVD and is the optimizer's fast path.
double purity_trace(const JointAmplitude& f);

/// I = |sum f .* conj(f^T)| / sum |f|^2. Requires both axes of the grid to
/// coincide so the frequency exchange is meaningful.
double indistinguishability(const JointAmplitude& f);

struct PairFilter {
  WavelengthBand band1;  // axis 1 passband, nm
  WavelengthBand band2;  // axis 2 passband, nm
  bool full_window = false;
};

/// Filter passing everything on the amplitude's grid.
PairFilter full_window_filter(const JointAmplitude& f);

/// Probability that both photons pass, |f_filt|^2 / |f|^2.
double pair_pass_probability(const JointAmplitude& f, const PairFilter& filter);

/// H = P_both / P_marginal, the probability the partner photon survives its
/// filter given its twin passed (twin = axis-2 photon).
double heralding_efficiency(const JointAmplitude& f, const PairFilter& filter);

/// eta = |f_eff|^2 / |f_jsa|^2 with quadrature weights; the unit-peak kernel
/// normalization keeps this within [0, 1].
double conversion_efficiency(const JointAmplitude& f_eff, const JointAmplitude& f_jsa);

/// Narrowest symmetric top-hat band (same band on both axes) reaching the
/// purity target; bisection on the band width down to one grid step.
PairFilter minimal_filter_for_purity(const JointAmplitude& f, double target_purity);

/// Band that keeps the central lobe of each marginal and removes sideband
/// structure. Marginals without sidebands give the full window.
PairFilter sideband_filter(const JointAmplitude& f);

struct MetricsReport {
  double purity = 0.0;
  double schmidt_number = 1.0;
  double indistinguishability = 0.0;
  double heralding_efficiency = 1.0;
  double conversion_efficiency = 1.0;
  double pair_pass_probability = 1.0;
  std::optional<PairFilter> filter;

  std::string to_json(int grid_points, const std::string& provenance) const;
};

/// All figures of merit of an effective JSA, with the sideband filter applied
/// for the heralding numbers.
MetricsReport evaluate_fc_metrics(const FcAmplitudes& amps);

}  // namespace fcspdc

#endif
