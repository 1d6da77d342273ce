#include "fcspdc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "fcspdc/units.hpp"

namespace fcspdc {

namespace {

void require_nonzero(const JointAmplitude& f) {
  const double n2 = f.squared_norm();
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw Error(ErrorKind::ZeroAmplitude, "amplitude is zero or not finite");
}

}  // namespace

double SchmidtSpectrum::schmidt_number() const {
  const double s4 = coefficients.array().square().square().sum();
  if (!(s4 > 0.0)) throw Error(ErrorKind::ZeroAmplitude, "empty Schmidt spectrum");
  return 1.0 / s4;
}

SchmidtSpectrum schmidt_decompose(const JointAmplitude& f) {
  require_nonzero(f);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(f.values);
  SchmidtSpectrum out;
  out.coefficients = svd.singularValues();
  out.coefficients /= out.coefficients.norm();
  return out;
}

double purity(const JointAmplitude& f) { return 1.0 / schmidt_decompose(f).schmidt_number(); }

double purity_trace(const JointAmplitude& f) {
  require_nonzero(f);
  // Tr[(f f^H)^2] = |f^H f|_F^2, Tr[f f^H] = |f|_F^2.
  const Eigen::MatrixXcd gram = f.values.adjoint() * f.values;
  const double tr = f.values.squaredNorm();
  return gram.squaredNorm() / (tr * tr);
}

double indistinguishability(const JointAmplitude& f) {
  require_nonzero(f);
  if (!f.grid.square_symmetric())
    throw Error(ErrorKind::NonSquareGrid,
                "indistinguishability needs identical axes on both dimensions");
  const std::complex<double> overlap = f.values.cwiseProduct(f.values.adjoint()).sum();
  return std::abs(overlap) / f.values.squaredNorm();
}

PairFilter full_window_filter(const JointAmplitude& f) {
  const auto& g = f.grid;
  PairFilter out;
  // axis values are frequencies; wavelength band endpoints swap
  out.band1 = {units::nm_from_omega(g.axis1(g.points - 1)), units::nm_from_omega(g.axis1(0))};
  out.band2 = {units::nm_from_omega(g.axis2(g.points - 1)), units::nm_from_omega(g.axis2(0))};
  out.full_window = true;
  return out;
}

namespace {

// Inclusive index window of the band on one axis, or empty.
struct IndexWindow {
  int lo = 0, hi = -1;
  bool empty() const { return hi < lo; }
};

IndexWindow index_window(const SpectralGrid& g, int axis, const WavelengthBand& band) {
  const double w_lo = units::omega_from_nm(band.hi_nm);
  const double w_hi = units::omega_from_nm(band.lo_nm);
  IndexWindow w;
  w.lo = g.points;
  w.hi = -1;
  for (int i = 0; i < g.points; ++i) {
    const double x = axis == 1 ? g.axis1(i) : g.axis2(i);
    if (x >= w_lo && x <= w_hi) {
      w.lo = std::min(w.lo, i);
      w.hi = std::max(w.hi, i);
    }
  }
  return w;
}

}  // namespace

double pair_pass_probability(const JointAmplitude& f, const PairFilter& filter) {
  require_nonzero(f);
  if (filter.full_window) return 1.0;
  const IndexWindow w1 = index_window(f.grid, 1, filter.band1);
  const IndexWindow w2 = index_window(f.grid, 2, filter.band2);
  if (w1.empty() || w2.empty())
    throw Error(ErrorKind::EmptyBand, "filter band does not intersect the grid");
  const double inside = f.values.block(w1.lo, w2.lo, w1.hi - w1.lo + 1, w2.hi - w2.lo + 1)
                            .squaredNorm();
  return inside / f.values.squaredNorm();
}

double heralding_efficiency(const JointAmplitude& f, const PairFilter& filter) {
  require_nonzero(f);
  if (filter.full_window) return 1.0;
  const IndexWindow w2 = index_window(f.grid, 2, filter.band2);
  if (w2.empty()) throw Error(ErrorKind::EmptyBand, "heralding band does not intersect the grid");
  const double total = f.values.squaredNorm();
  const double marginal = f.values.middleCols(w2.lo, w2.hi - w2.lo + 1).squaredNorm() / total;
  if (!(marginal > 0.0))
    throw Error(ErrorKind::DivisionByZero, "heralding arm passes no intensity");
  return pair_pass_probability(f, filter) / marginal;
}

double conversion_efficiency(const JointAmplitude& f_eff, const JointAmplitude& f_jsa) {
  require_nonzero(f_eff);
  require_nonzero(f_jsa);
  return f_eff.weighted_squared_norm() / f_jsa.weighted_squared_norm();
}

namespace {

PairFilter centered_filter(const SpectralGrid& g, double half_width_omega) {
  PairFilter filter;
  filter.band1 = {units::nm_from_omega(g.center1 + half_width_omega),
                  units::nm_from_omega(g.center1 - half_width_omega)};
  filter.band2 = {units::nm_from_omega(g.center2 + half_width_omega),
                  units::nm_from_omega(g.center2 - half_width_omega)};
  return filter;
}

double filtered_purity(const JointAmplitude& f, const PairFilter& filter) {
  JointAmplitude cut = apply_tophat_filter(f, filter.band1, filter.band2);
  if (!(cut.squared_norm() > 0.0)) return 0.0;
  return purity(cut);
}

}  // namespace

PairFilter minimal_filter_for_purity(const JointAmplitude& f, double target_purity) {
  require_nonzero(f);
  if (!(target_purity > 0.0 && target_purity <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "purity target must be in (0, 1]");

  if (purity(f) >= target_purity) return full_window_filter(f);

  const auto& g = f.grid;
  const double hw_max = std::max(g.half1, g.half2);
  const double step = std::min(g.step1(), g.step2());

  // narrowest resolvable band: one grid step
  const double hw_min = step;
  if (filtered_purity(f, centered_filter(g, hw_min)) < target_purity)
    throw Error(ErrorKind::Unachievable,
                "purity target unreachable even at the narrowest resolvable band");

  double lo = hw_min, hi = hw_max;
  while (hi - lo > step) {
    const double mid = 0.5 * (lo + hi);
    if (filtered_purity(f, centered_filter(g, mid)) >= target_purity) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return centered_filter(g, lo);
}

namespace {

// First pronounced local minimum of the marginal on each side of its peak;
// returns index bounds of the central lobe, or the full range when the
// marginal decays monotonically (no sidebands).
IndexWindow central_lobe(const Eigen::VectorXd& marginal) {
  const int n = static_cast<int>(marginal.size());
  int peak = 0;
  marginal.maxCoeff(&peak);
  const double rebound_floor = 1e-6 * marginal(peak);

  IndexWindow w{0, n - 1};
  for (int dir : {-1, +1}) {
    int bound = dir < 0 ? 0 : n - 1;
    for (int j = peak + dir; j > 0 && j < n - 1; j += dir) {
      if (marginal(j) <= marginal(j - 1) && marginal(j) <= marginal(j + 1)) {
        // require an actual rebound beyond the minimum
        double rebound = 0.0;
        for (int k = j + dir; k >= 0 && k < n; k += dir)
          rebound = std::max(rebound, marginal(k) - marginal(j));
        if (rebound > rebound_floor) {
          bound = j;
          break;
        }
      }
    }
    if (dir < 0) {
      w.lo = bound;
    } else {
      w.hi = bound;
    }
  }
  return w;
}

}  // namespace

PairFilter sideband_filter(const JointAmplitude& f) {
  require_nonzero(f);
  const auto& g = f.grid;
  const Eigen::VectorXd m1 = f.values.cwiseAbs2().rowwise().sum();
  const Eigen::VectorXd m2 = f.values.cwiseAbs2().colwise().sum().transpose();
  const IndexWindow w1 = central_lobe(m1);
  const IndexWindow w2 = central_lobe(m2);
  if (w1.lo == 0 && w1.hi == g.points - 1 && w2.lo == 0 && w2.hi == g.points - 1)
    return full_window_filter(f);
  PairFilter filter;
  filter.band1 = {units::nm_from_omega(g.axis1(w1.hi)), units::nm_from_omega(g.axis1(w1.lo))};
  filter.band2 = {units::nm_from_omega(g.axis2(w2.hi)), units::nm_from_omega(g.axis2(w2.lo))};
  return filter;
}

std::string MetricsReport::to_json(int grid_points, const std::string& provenance) const {
  nlohmann::json j;
  j["purity"] = purity;
  j["schmidt_number"] = schmidt_number;
  j["indistinguishability"] = indistinguishability;
  j["heralding_efficiency"] = heralding_efficiency;
  j["conversion_efficiency"] = conversion_efficiency;
  j["pair_pass_probability"] = pair_pass_probability;
  j["units"] = {{"wavelength", "nm"}, {"bandwidth", "rad/fs"}};
  j["grid_points"] = grid_points;
  j["provenance"] = provenance;
  if (filter) {
    j["filter"] = {{"band1_nm", {filter->band1.lo_nm, filter->band1.hi_nm}},
                   {"band2_nm", {filter->band2.lo_nm, filter->band2.hi_nm}},
                   {"full_window", filter->full_window}};
  }
  return j.dump(2);
}

MetricsReport evaluate_fc_metrics(const FcAmplitudes& amps) {
  MetricsReport report;
  report.purity = purity(amps.f_eff);
  report.schmidt_number = 1.0 / report.purity;
  report.indistinguishability = indistinguishability(amps.f_eff);
  report.conversion_efficiency = conversion_efficiency(amps.f_eff, amps.f_jsa);
  const PairFilter filter = sideband_filter(amps.f_eff);
  report.filter = filter;
  report.pair_pass_probability = pair_pass_probability(amps.f_eff, filter);
  report.heralding_efficiency = heralding_efficiency(amps.f_eff, filter);
  return report;
}

}  // namespace fcspdc
