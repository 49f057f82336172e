#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lrising/entanglement.hpp"
#include "lrising/hamiltonian.hpp"
#include "lrising/observables.hpp"
#include "lrising/scaling.hpp"
#include "lrising/spectrum.hpp"

using namespace lrising;

namespace {

std::vector<double> ghz(int n) {
  std::vector<double> v(std::size_t{1} << n, 0.0);
  v[0] = v[v.size() - 1] = 1.0 / std::sqrt(2.0);
  return v;
}

std::vector<double> ghz_minus(int n) {
  std::vector<double> v(std::size_t{1} << n, 0.0);
  v[0] = 1.0 / std::sqrt(2.0);
  v[v.size() - 1] = -1.0 / std::sqrt(2.0);
  return v;
}

std::vector<double> dicke(int n) {
  std::vector<double> v(std::size_t{1} << n, 0.0);
  std::size_t count = 0;
  for (std::size_t b = 0; b < v.size(); ++b)
    if (__builtin_popcountll(b) == n / 2) ++count;
  const double amp = 1.0 / std::sqrt(static_cast<double>(count));
  for (std::size_t b = 0; b < v.size(); ++b)
    if (__builtin_popcountll(b) == n / 2) v[b] = amp;
  return v;
}

std::vector<double> down_x_product(int n) {
  std::vector<double> v(std::size_t{1} << n);
  const double amp = std::pow(2.0, -0.5 * n);
  for (std::size_t b = 0; b < v.size(); ++b)
    v[b] = amp * ((__builtin_popcountll(b) % 2 == 0) ? 1.0 : -1.0);
  return v;
}

ChainParams params(int n, double alpha, double theta, double h = 0.0) {
  ChainParams p;
  p.n_spins = n;
  p.alpha = alpha;
  p.theta = theta;
  p.sym_break_h = h;
  return p;
}

std::span<const double> col0(const SpectrumResult& s) {
  return {s.eigenvectors.col(0).data(), static_cast<std::size_t>(s.eigenvectors.rows())};
}

}  // namespace

TEST(QfiPure, ReferenceStates) {
  EXPECT_NEAR(qfi_pure(ghz(6), {Axis::Z, false}, 6), 6.0, 1e-12);  // Heisenberg limit
  auto s = ground_spectrum(params(8, 2.0, 0.0), 1);
  EXPECT_NEAR(qfi_pure(col0(s), {Axis::Y, false}, 8), 1.0, 1e-10);
  EXPECT_NEAR(qfi_pure(col0(s), {Axis::Z, false}, 8), 1.0, 1e-10);
  EXPECT_NEAR(qfi_pure(dicke(6), {Axis::Y, false}, 6), 4.0, 1e-12);  // N/2 + 1
}

TEST(QfiFromCorrelations, ClosedForms) {
  auto g = ghz(6);
  EXPECT_NEAR(qfi_from_correlations(connected_correlations(g, Axis::Z, 6), false), 6.0, 1e-12);
  auto dx = down_x_product(6);
  EXPECT_NEAR(qfi_from_correlations(connected_correlations(dx, Axis::Y, 6), false), 1.0, 1e-12);
  // Neel pattern, staggered weight
  std::vector<double> v(64, 0.0);
  std::uint64_t a = 0b010101;
  v[a] = v[~a & 63] = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(qfi_from_correlations(connected_correlations(v, Axis::Z, 6), true), 6.0, 1e-12);
}

TEST(QfiIdentity, PureEqualsCorrelationForm) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uth(-1.5, 1.5);
  std::uniform_real_distribution<double> ua(0.0, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 4 + 2 * static_cast<int>(rng() % 4);  // 4..10
    double alpha = ua(rng);
    if (rep % 5 == 0) alpha = kAlphaInf;
    const double h = (rep % 3 == 0) ? 1e-3 : 0.0;
    auto s = ground_spectrum(params(n, alpha, uth(rng), h), 1);
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
      auto c = connected_correlations(col0(s), ax, n);
      for (bool st : {false, true}) {
        const double a1 = qfi_pure(col0(s), {ax, st}, n);
        const double a2 = qfi_from_correlations(c, st);
        EXPECT_NEAR(a1, a2, 1e-10);
      }
    }
  }
}

TEST(Tomography, BestLabelsInKnownRegimes) {
  // long-range paramagnet: J_y optimal
  {
    auto s = ground_spectrum(params(14, 0.1, 0.1), 1);
    auto t = tomography(col0(s), 14);
    EXPECT_EQ(to_string(t.best_label), "y");
    EXPECT_GT(t.best_value, 1.0);
  }
  // AFM phase: staggered J_z optimal
  {
    auto s = ground_spectrum(params(14, 1.0, 1.4), 2);
    auto t = tomography(col0(s), 14);
    EXPECT_EQ(to_string(t.best_label), "z_st");
    EXPECT_GT(t.best_value, 10.0);
  }
  // short-range paramagnet: y and z_st compete, both order one
  {
    auto s = ground_spectrum(params(14, 3.0, 0.1), 1);
    auto t = tomography(col0(s), 14);
    EXPECT_TRUE(to_string(t.best_label) == "y" || to_string(t.best_label) == "z_st");
    EXPECT_GT(t.best_value, 1.0);
    EXPECT_LT(t.best_value, 2.0);
  }
}

TEST(Tomography, WitnessedDepthAndXLabels) {
  auto t = tomography(ghz(8), 8);
  EXPECT_EQ(t.witnessed_depth, 7);  // f_Q = 8 > 7
  EXPECT_LE(t.witnessed_depth, 8);
  auto s = ground_spectrum(params(10, 0.5, 0.9), 1);
  auto tt = tomography(col0(s), 10);
  EXPECT_LE(tt.f_q[label_index({Axis::X, false})], 1.0 + 1e-8);
  EXPECT_LE(tt.f_q[label_index({Axis::X, true})], 1.0 + 1e-8);
  EXPECT_LE(tt.witnessed_depth, 10);
}

TEST(Separability, ThetaZeroLine) {
  for (double alpha : {0.0, 0.5, 1.0, 2.0, 3.0, kAlphaInf}) {
    auto s = ground_spectrum(params(8, alpha, 0.0), 1);
    auto t = tomography(col0(s), 8);
    for (auto l : kAllLabels) EXPECT_LE(t.f_q[label_index(l)], 1.0 + 1e-8);
    EXPECT_NEAR(t.f_q[label_index({Axis::Y, false})], 1.0, 1e-9);
    EXPECT_NEAR(t.f_q[label_index({Axis::Z, false})], 1.0, 1e-9);
  }
}

TEST(SpinSqueezing, CoherentStateUnity) {
  auto dx = down_x_product(8);
  auto r = spin_squeezing(dx, Axis::X, Axis::Z, 8);
  EXPECT_NEAR(r.xi2, 1.0, 1e-10);
}

TEST(SpinSqueezing, UndefinedOnGhz) {
  auto g = ghz(6);
  EXPECT_THROW(spin_squeezing(g, Axis::X, Axis::Z, 6), SqueezingUndefinedError);
}

TEST(SpinSqueezing, TracksQfiInLongRangeParamagnet) {
  auto s = ground_spectrum(params(8, 0.5, 0.3), 1);
  const double fy = qfi_pure(col0(s), {Axis::Y, false}, 8);
  const double inv_xi2 = 1.0 / spin_squeezing(col0(s), Axis::X, Axis::Z, 8).xi2;
  EXPECT_NEAR(inv_xi2, fy, 0.1 * fy);
}

TEST(SpinSqueezing, BoundChain) {
  // 1/xi_R^2 <= f_Q(perp') + 1e-8 with (par, perp, perp') = (x, z, y) / (x, y, z)
  for (double theta : {-0.8, -0.2, 0.3, 1.0}) {
    auto s = ground_spectrum(params(8, 0.7, theta), 1);
    const Axis perp = squeezing_perp_axis(theta);
    const Axis perp_prime = perp == Axis::Z ? Axis::Y : Axis::Z;
    double inv_xi2 = 0.0;
    try {
      inv_xi2 = 1.0 / spin_squeezing(col0(s), Axis::X, perp, 8).xi2;
    } catch (const SqueezingUndefinedError&) {
      continue;
    }
    EXPECT_LE(inv_xi2, qfi_pure(col0(s), {perp_prime, false}, 8) + 1e-8);
  }
}

TEST(DegenerateLimit, GhzPairAndProductPair) {
  auto gp = ghz(6);
  auto gm = ghz_minus(6);
  EXPECT_NEAR(qfi_degenerate_limit(gp, gm, {Axis::Z, false}, 6), 0.0, 1e-12);

  std::vector<double> up(64, 0.0), dn(64, 0.0);
  up[0] = 1.0;
  dn[63] = 1.0;
  EXPECT_NEAR(qfi_degenerate_limit(up, dn, {Axis::Z, false}, 6), 0.0, 1e-12);
}

TEST(DegenerateLimit, RejectsNonOrthogonalPair) {
  auto gp = ghz(4);
  EXPECT_THROW(qfi_degenerate_limit(gp, gp, {Axis::Z, false}, 4), std::domain_error);
}

TEST(ThermalQfi, ZeroTemperatureMatchesPure) {
  auto H = build_hamiltonian(params(6, 2.0, 0.3));
  auto s = full_spectrum(H);
  const double f0 = qfi_thermal_label(s, 0.0, {Axis::Y, false});
  EXPECT_NEAR(f0, qfi_pure(col0(s), {Axis::Y, false}, 6), 1e-8);
  // T -> 0+ smoothly approaches the same value for a gapped unique ground state
  EXPECT_NEAR(qfi_thermal_label(s, 1e-4, {Axis::Y, false}), f0, 1e-8);
}

TEST(ThermalQfi, InfiniteTemperatureVanishes) {
  auto s = full_spectrum(build_hamiltonian(params(6, 1.0, 0.9)));
  for (auto l : kAllLabels) EXPECT_LT(qfi_thermal_label(s, 1e9, l), 1e-6);
}

TEST(ThermalQfi, RequiresFullSpectrum) {
  auto H = build_hamiltonian(params(12, 1.0, 0.4));
  auto part = lowest_eigenpairs(H, 2);
  EXPECT_THROW(qfi_thermal_label(part, 0.1, {Axis::Y, false}), std::invalid_argument);
}

TEST(ThermalQfi, DegenerateClusterLimitMatchesPairFormula) {
  // quasi-degenerate FM doublet: T=0 cluster limit equals the two-state
  // formula exactly; small positive T in the window delta << T << gap
  // agrees to 1e-6
  auto H = build_hamiltonian(params(8, 3.0, -1.3));
  auto s = full_spectrum(H);
  const std::size_t dim = s.size();
  const double eq10 =
      qfi_degenerate_limit(std::span<const double>(s.eigenvectors.col(0).data(), dim),
                           std::span<const double>(s.eigenvectors.col(1).data(), dim),
                           {Axis::Z, false}, 8);
  EXPECT_NEAR(qfi_thermal_label(s, 0.0, {Axis::Z, false}), eq10, 1e-10);
  EXPECT_NEAR(qfi_thermal_label(s, 0.03, {Axis::Z, false}), eq10, 1e-6);
}

TEST(ThermalQfi, AfmDoubletAgreesAtSmallT) {
  auto H = build_hamiltonian(params(8, 1.0, 1.4));
  auto s = full_spectrum(H);
  const std::size_t dim = s.size();
  const double eq10 =
      qfi_degenerate_limit(std::span<const double>(s.eigenvectors.col(0).data(), dim),
                           std::span<const double>(s.eigenvectors.col(1).data(), dim),
                           {Axis::Z, true}, 8);
  EXPECT_NEAR(qfi_thermal_label(s, 1e-2, {Axis::Z, true}), eq10, 1e-4);
}

TEST(ThermalBound, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(thermal_lower_bound(1.0, 0.0, 1, 1), 1.0);
  EXPECT_NEAR(thermal_lower_bound(2.0, 1.0, 1, 1), std::tanh(1.0) * std::tanh(1.0) *
                                                       (1.0 + std::exp(-2.0)) /
                                                       (1.0 + std::exp(-2.0)),
              1e-12);
  EXPECT_NEAR(thermal_lower_bound(1e-9, 1.0, 1, 1), 0.0, 1e-12);
  EXPECT_THROW(thermal_lower_bound(0.0, 1.0, 1, 1), std::domain_error);
  EXPECT_THROW(thermal_lower_bound(1.0, 1.0, 0, 1), std::domain_error);
}

TEST(ThermalBound, HoldsOnSampledPoints) {
  for (double alpha : {0.5, 3.0}) {
    for (double theta : {0.3, 0.785}) {
      auto H = build_hamiltonian(params(8, alpha, theta));
      auto s = full_spectrum(H);
      ThermalQfiOptions topts;
      const std::size_t mu_end = s.cluster_end(0, 1.0, topts.t0_cluster_tol);
      ASSERT_LT(mu_end, s.size());
      const double gap = s.eigenvalues[mu_end] - s.eigenvalues[0];
      std::size_t nu_end = mu_end + 1;
      while (nu_end < s.size() &&
             (s.eigenvalues[nu_end] - s.eigenvalues[nu_end - 1]) < topts.t0_cluster_tol)
        ++nu_end;
      const int mu = static_cast<int>(mu_end), nu = static_cast<int>(nu_end - mu_end);
      const double f0 = qfi_thermal_label(s, 0.0, {Axis::Y, false}, topts);
      for (double T : {0.05, 0.2, 0.5, 1.0}) {
        const double r = qfi_thermal_label(s, T, {Axis::Y, false}, topts) / f0;
        EXPECT_GE(r, thermal_lower_bound(gap, T, mu, nu) - 1e-9);
      }
    }
  }
}
