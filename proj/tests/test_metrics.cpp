#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "fcspdc/metrics.hpp"
#include "fcspdc/optimizer.hpp"
#include "fcspdc/units.hpp"

using namespace fcspdc;

TEST_SUITE_BEGIN("metrics");

namespace {

JointAmplitude tilted_gaussian(double angle_deg, double sigma_major, double sigma_minor, int n) {
  // centered 2-D Gaussian amplitude with principal axes rotated by angle
  JointAmplitude f;
  const double half = 5.0 * sigma_major;
  f.grid = SpectralGrid{2.4, 2.4, half, half, n};
  f.values.resize(n, n);
  const double c = std::cos(angle_deg * units::pi / 180.0);
  const double s = std::sin(angle_deg * units::pi / 180.0);
  for (int i = 0; i < n; ++i) {
    const double x = f.grid.axis1(i) - 2.4;
    for (int j = 0; j < n; ++j) {
      const double y = f.grid.axis2(j) - 2.4;
      const double u = c * x + s * y;
      const double v = -s * x + c * y;
      f.values(i, j) = std::exp(-u * u / (2 * sigma_major * sigma_major) -
                                v * v / (2 * sigma_minor * sigma_minor));
    }
  }
  return f;
}

// Brute-force purity Tr[(f f^H)^2] / Tr[f f^H]^2 by explicit sums; no SVD,
// no matrix library calls.
double purity_bruteforce(const JointAmplitude& f) {
  const int n = f.grid.points;
  std::vector<std::vector<std::complex<double>>> gram(n, std::vector<std::complex<double>>(n));
  double trace = 0.0;
  for (int q = 0; q < n; ++q) {
    for (int p = 0; p < n; ++p) {
      std::complex<double> acc = 0.0;
      for (int r = 0; r < n; ++r) acc += f.values(q, r) * std::conj(f.values(p, r));
      gram[q][p] = acc;
    }
    trace += gram[q][q].real();
  }
  double tr2 = 0.0;
  for (int q = 0; q < n; ++q)
    for (int p = 0; p < n; ++p) tr2 += std::norm(gram[q][p]);
  return tr2 / (trace * trace);
}

double indist_bruteforce(const JointAmplitude& f) {
  const int n = f.grid.points;
  std::complex<double> overlap = 0.0;
  double total = 0.0;
  for (int q = 0; q < n; ++q)
    for (int r = 0; r < n; ++r) {
      overlap += f.values(q, r) * std::conj(f.values(r, q));
      total += std::norm(f.values(q, r));
    }
  return std::abs(overlap) / total;
}

}  // namespace

TEST_CASE("rank-one amplitude: single Schmidt coefficient, unit purity") {
  const int n = 96;
  JointAmplitude f;
  f.grid = SpectralGrid{2.4, 2.4, 0.01, 0.01, n};
  Eigen::VectorXcd u(n), v(n);
  for (int i = 0; i < n; ++i) {
    const double x = (i - n / 2.0) / (n / 8.0);
    u(i) = std::exp(-x * x);
    v(i) = std::exp(-0.7 * x * x);
  }
  f.values = u * v.transpose();

  const SchmidtSpectrum s = schmidt_decompose(f);
  CHECK(s.coefficients(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.schmidt_number() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(purity(f) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.coefficients.squaredNorm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("equal two-mode superposition gives K = 2") {
  const int n = 64;
  JointAmplitude f;
  f.grid = SpectralGrid{2.4, 2.4, 0.01, 0.01, n};
  f.values = Eigen::MatrixXcd::Zero(n, n);
  // two orthogonal rank-one terms with equal weight
  Eigen::VectorXcd u1 = Eigen::VectorXcd::Zero(n), u2 = Eigen::VectorXcd::Zero(n);
  u1(10) = 1.0;
  u2(30) = 1.0;
  f.values = u1 * u1.transpose() + u2 * u2.transpose();
  CHECK(schmidt_decompose(f).schmidt_number() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("45-degree Gaussian: purity follows 2r/(1+r^2)") {
  for (double r : {1.5, 2.0, 3.0}) {
    const JointAmplitude f = tilted_gaussian(45.0, r * 2e-3, 2e-3, 257);
    const double expected = 2.0 * r / (1.0 + r * r);
    CHECK(purity(f) == doctest::Approx(expected).epsilon(2e-3));
    CHECK(purity_bruteforce(f) == doctest::Approx(expected).epsilon(2e-3));
  }
}

TEST_CASE("SVD purity equals the brute-force trace oracle on random amplitudes") {
  std::mt19937 rng(20210707);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const int n = 48;  // coarse grid keeps the quadruple-sum oracle affordable
  for (int trial = 0; trial < 20; ++trial) {
    JointAmplitude f;
    f.grid = SpectralGrid{2.4, 2.4, 0.01, 0.01, n};
    f.values.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) f.values(i, j) = std::complex<double>(uni(rng), uni(rng));
    const double p_svd = purity(f);
    const double p_brute = purity_bruteforce(f);
    const double p_trace = purity_trace(f);
    CHECK(p_svd == doctest::Approx(p_brute).epsilon(1e-6));
    CHECK(p_trace == doctest::Approx(p_brute).epsilon(1e-10));

    const SchmidtSpectrum s = schmidt_decompose(f);
    CHECK(s.coefficients.squaredNorm() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("purity and indistinguishability are transpose and scale invariant") {
  const JointAmplitude f = tilted_gaussian(30.0, 6e-3, 2e-3, 127);
  JointAmplitude ft = f;
  ft.values = f.values.transpose().eval();
  CHECK(purity(f) == doctest::Approx(purity(ft)).epsilon(1e-11));
  CHECK(indistinguishability(f) == doctest::Approx(indistinguishability(ft)).epsilon(1e-11));

  JointAmplitude fs = f;
  fs.values *= 37.5;
  CHECK(purity(f) == doctest::Approx(purity(fs)).epsilon(1e-11));
  CHECK(indistinguishability(f) == doctest::Approx(indistinguishability(fs)).epsilon(1e-11));
}

TEST_CASE("symmetric amplitudes are perfectly indistinguishable") {
  const JointAmplitude f = tilted_gaussian(45.0, 5e-3, 2e-3, 127);  // symmetric under exchange
  CHECK(indistinguishability(f) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("vertical elliptical Gaussian with axis ratio 3") {
  const JointAmplitude f = tilted_gaussian(90.0, 6e-3, 2e-3, 257);
  const double expected = 2.0 * 3.0 / (1.0 + 9.0);  // 2ab/(a^2+b^2) with b = 3a
  CHECK(indistinguishability(f) == doctest::Approx(indist_bruteforce(f)).epsilon(1e-10));
  CHECK(indistinguishability(f) == doctest::Approx(expected).epsilon(2e-3));
}

TEST_CASE("indistinguishability requires a symmetric grid") {
  JointAmplitude f = tilted_gaussian(45.0, 4e-3, 2e-3, 96);
  f.grid.center2 *= 1.02;
  CHECK_THROWS_AS(indistinguishability(f), Error);
}

TEST_CASE("pair pass probability: full window and erf-oracle half band") {
  const double sigma = 2e-3;
  const JointAmplitude f = tilted_gaussian(0.0, sigma, sigma, 257);  // separable circular
  CHECK(pair_pass_probability(f, full_window_filter(f)) == doctest::Approx(1.0));

  // symmetric band at +-w in omega on both axes: P_both = erf(w/(sqrt(2) s))^2
  // for the intensity (amplitude sigma s -> intensity sigma s/sqrt(2))
  const double w = 1.5 * sigma;
  PairFilter filter;
  filter.band1 = {units::nm_from_omega(2.4 + w), units::nm_from_omega(2.4 - w)};
  filter.band2 = filter.band1;
  const double erf_one_axis = std::erf(w / sigma);  // intensity variance sigma^2/2
  const double expected = erf_one_axis * erf_one_axis;
  CHECK(pair_pass_probability(f, filter) == doctest::Approx(expected).epsilon(2e-3));
}

TEST_CASE("filter norm monotone in band width") {
  const JointAmplitude f = tilted_gaussian(40.0, 4e-3, 1.5e-3, 127);
  double prev = 0.0;
  for (double scale : {0.5, 1.0, 1.5, 2.0, 3.0, 5.0}) {
    const double w = scale * 2e-3;
    PairFilter filter;
    filter.band1 = {units::nm_from_omega(2.4 + w), units::nm_from_omega(2.4 - w)};
    filter.band2 = filter.band1;
    const double p = pair_pass_probability(f, filter);
    CHECK(p >= prev - 1e-12);
    prev = p;
  }
}

TEST_CASE("heralding efficiency: full window unity, conditional definition") {
  const JointAmplitude f = tilted_gaussian(10.0, 4e-3, 2e-3, 127);
  CHECK(heralding_efficiency(f, full_window_filter(f)) == 1.0);

  const double w = 3e-3;
  PairFilter filter;
  filter.band1 = {units::nm_from_omega(2.4 + w), units::nm_from_omega(2.4 - w)};
  filter.band2 = filter.band1;
  const double h = heralding_efficiency(f, filter);
  const double p_both = pair_pass_probability(f, filter);
  CHECK(h >= p_both);  // conditioning can only raise the number
  CHECK(h <= 1.0 + 1e-12);
}

TEST_CASE("conversion efficiency: identity kernel gives one") {
  const int n = 96;
  const SpectralGrid gj{2.4, 0.8, 0.01, 0.008, n};
  const SpectralGrid gc{0.8, 2.4, 0.008, 0.01, n};
  JointAmplitude f_jsa;
  f_jsa.grid = gj;
  f_jsa.values = Eigen::MatrixXcd::Random(n, n);
  JointAmplitude f_jca;
  f_jca.grid = gc;
  f_jca.values = Eigen::MatrixXcd::Identity(n, n) / gc.step1();
  const JointAmplitude f_eff = effective_jsa(f_jca, f_jsa);
  // identical per-element values; weights differ only through the axis steps
  const double eta = conversion_efficiency(f_eff, f_jsa);
  CHECK(eta == doctest::Approx(gc.step2() / gj.step2()).epsilon(1e-12));
}

TEST_CASE("minimal filter: already-pure state returns the full window") {
  const JointAmplitude f = tilted_gaussian(0.0, 2e-3, 2e-3, 127);
  const PairFilter filter = minimal_filter_for_purity(f, 0.99);
  CHECK(filter.full_window);
}

TEST_CASE("minimal filter reaches the target and width-purity is monotone") {
  const JointAmplitude f = tilted_gaussian(-45.0, 8e-3, 1.2e-3, 257);  // strongly correlated
  CHECK(purity(f) < 0.5);
  const PairFilter filter = minimal_filter_for_purity(f, 0.99);
  JointAmplitude cut = apply_tophat_filter(f, filter.band1, filter.band2);
  CHECK(purity(cut) >= 0.99);

  // scan oracle: purity nonincreasing as the symmetric band widens
  double prev = 1.1;
  for (int k = 2; k <= 50; ++k) {
    const double w = k * 8e-3 / 50.0;
    PairFilter scan;
    scan.band1 = {units::nm_from_omega(2.4 + w), units::nm_from_omega(2.4 - w)};
    scan.band2 = scan.band1;
    JointAmplitude g = apply_tophat_filter(f, scan.band1, scan.band2);
    if (!(g.squared_norm() > 0.0)) continue;
    const double p = purity(g);
    CHECK(p <= prev + 5e-3);
    prev = p;
  }
}

TEST_CASE("sideband filter: none on a Gaussian, lobes trimmed on a sinc ridge") {
  const JointAmplitude smooth = tilted_gaussian(20.0, 4e-3, 2e-3, 127);
  CHECK(sideband_filter(smooth).full_window);

  // slightly tilted near-vertical sinc ridge: the lobes survive in the
  // axis-1 marginal and the tilt correlates the two photons
  const int n = 255;
  JointAmplitude f;
  f.grid = SpectralGrid{2.4, 2.4, 0.02, 0.02, n};
  f.values.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; };
      const double x1 = f.grid.axis1(i) - 2.4;
      const double x2 = f.grid.axis2(j) - 2.4;
      const double u = (x1 - 0.25 * x2) / 2e-3;
      f.values(i, j) = sinc(u) * std::exp(-x2 * x2 / (2.0 * 3e-3 * 3e-3));
    }
  const PairFilter filter = sideband_filter(f);
  CHECK(!filter.full_window);
  JointAmplitude cut = apply_tophat_filter(f, filter.band1, filter.band2);
  // central lobe retained: most of the intensity survives
  CHECK(pair_pass_probability(f, filter) > 0.6);
  // and the trimmed state is purer than the raw one
  CHECK(purity(cut) > purity(f));
}

TEST_CASE("metrics report serializes with units and provenance") {
  const JointAmplitude f = tilted_gaussian(0.0, 2e-3, 2e-3, 96);
  MetricsReport report;
  report.purity = purity(f);
  report.schmidt_number = 1.0 / report.purity;
  report.indistinguishability = indistinguishability(f);
  const std::string j = report.to_json(96, "unit-test");
  CHECK(j.find("\"purity\"") != std::string::npos);
  CHECK(j.find("\"units\"") != std::string::npos);
  CHECK(j.find("unit-test") != std::string::npos);
}

TEST_SUITE_END();
