#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "lrising/core.hpp"
#include "lrising/hamiltonian.hpp"
#include "lrising/observables.hpp"
#include "lrising/spectrum.hpp"

namespace lrising {

/// QFI density of a pure state: f_Q = 4 Var(J_label) / N.
inline double qfi_pure(std::span<const double> state, CollectiveLabel label, int n_spins) {
  return 4.0 * variance(state, build_collective(label, n_spins)) / n_spins;
}

/// QFI density from connected correlations:
/// f_Q = (1/N) sum_ij (+-1)^(i-j) C_ll^(i,j).
/// Equals qfi_pure on the same state and axis (exact identity).
inline double qfi_from_correlations(const CorrelationMatrix& c, bool staggered) {
  const int n = c.n_spins;
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double sgn = staggered ? ((i - j) % 2 == 0 ? 1.0 : -1.0) : 1.0;
      acc += sgn * c.at(i, j);
    }
  return acc / n;
}

/// Wineland spin squeezing xi_R^2 = N Var(J_perp) / <J_par>^2.
struct SqueezingResult {
  double xi2 = 0.0;
  Axis axis_parallel = Axis::X;
  Axis axis_perp = Axis::Z;
};

inline SqueezingResult spin_squeezing(std::span<const double> state, Axis parallel, Axis perp,
                                      int n_spins) {
  const double mean_par = expectation(state, build_collective({parallel, false}, n_spins));
  if (std::abs(mean_par) < 1e-8 * n_spins)
    throw SqueezingUndefinedError("spin_squeezing: vanishing mean spin along the parallel axis");
  const double var_perp = variance(state, build_collective({perp, false}, n_spins));
  return {n_spins * var_perp / (mean_par * mean_par), parallel, perp};
}

/// Perpendicular axis used on each side of theta = 0: z for theta >= 0 and
/// y for theta < 0 (parallel axis always x). The z-everywhere alternative
/// is the other published convention; both are supported by calling
/// spin_squeezing directly.
inline Axis squeezing_perp_axis(double theta) { return theta >= 0.0 ? Axis::Z : Axis::Y; }

/// QFI tomography over the six collective operators.
struct QfiTomography {
  std::array<double, 6> f_q{};  // indexed by label_index()
  CollectiveLabel best_label{};
  double best_value = 0.0;
  int witnessed_depth = 0;  // largest integer k with f_Q > k

  double operator[](CollectiveLabel l) const { return f_q[static_cast<std::size_t>(label_index(l))]; }
};

inline QfiTomography tomography(std::span<const double> state, int n_spins) {
  QfiTomography t;
  bool first = true;
  for (auto l : kAllLabels) {
    const double f = qfi_pure(state, l, n_spins);
    t.f_q[static_cast<std::size_t>(label_index(l))] = f;
    if (first || f > t.best_value) {
      t.best_value = f;
      t.best_label = l;
      first = false;
    }
  }
  t.witnessed_depth = std::clamp(static_cast<int>(std::ceil(t.best_value)) - 1, 0, n_spins);
  return t;
}

/// Two-state degenerate limit of the thermal QFI density:
/// (2/N) [ Var_1 + Var_2 - 2 |<1|O|2>|^2 ] on an orthonormal real pair.
inline double qfi_degenerate_limit(std::span<const double> gs1, std::span<const double> gs2,
                                   CollectiveLabel label, int n_spins) {
  if (gs1.size() != gs2.size())
    throw std::invalid_argument("qfi_degenerate_limit: dimension mismatch");
  double dot = 0.0, n1 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < gs1.size(); ++i) {
    dot += gs1[i] * gs2[i];
    n1 += gs1[i] * gs1[i];
    n2 += gs2[i] * gs2[i];
  }
  if (std::abs(dot) > 1e-8 || std::abs(n1 - 1.0) > 1e-8 || std::abs(n2 - 1.0) > 1e-8)
    throw std::domain_error("qfi_degenerate_limit: states must be an orthonormal pair");
  SparseOperator op = build_collective(label, n_spins);
  std::vector<double> y(gs2.size());
  op.apply(gs2, y);
  double cross = 0.0;
  for (std::size_t i = 0; i < gs1.size(); ++i) cross += gs1[i] * y[i];
  const double v1 = variance(gs1, op);
  const double v2 = variance(gs2, op);
  return 2.0 / n_spins * (v1 + v2 - 2.0 * cross * cross);
}

/// Analytic lower bound on f_Q(T) / f_Q(T->0), in terms of the gap and the
/// degeneracies mu (ground) and nu (first excited).
inline double thermal_lower_bound(double gap, double T, int mu, int nu) {
  if (!(gap > 0.0)) throw std::domain_error("thermal_lower_bound: gap must be positive");
  if (mu < 1 || nu < 1) throw std::domain_error("thermal_lower_bound: mu, nu >= 1");
  if (T < 0.0) throw std::domain_error("thermal_lower_bound: T < 0");
  if (T == 0.0) return 1.0;
  const double th = std::tanh(gap / (2.0 * T));
  const double ex = std::exp(-gap / T);
  return th * th * mu * (1.0 + ex) / (mu + nu * ex);
}

/// Relative tolerance grouping the quasi-degenerate ground cluster for the
/// T -> 0 equal-weight mixture. Looser than the spectral degeneracy
/// tolerance: ordered-phase doublet splittings (~1e-5 J) are physically part
/// of the T -> 0 cluster.
inline constexpr double kThermalClusterTol = 1e-4;

struct ThermalQfiOptions {
  double weight_cutoff = 1e-14;               // skip pairs with p_k + p_k' below this
  double t0_cluster_tol = kThermalClusterTol; // T = 0 ground-cluster grouping (relative)
  double coupling = 1.0;
};

/// Thermal QFI of one collective operator over a full spectrum:
/// F_Q = 2 sum_{k,k'} (p_k - p_k')^2 / (p_k + p_k') |<k|O|k'>|^2,
/// Boltzmann weights p_k = e^(-(E_k-E_0)/T) / Z. At T = 0 the equal-weight
/// mixture over the ground cluster is used. The operator matrix in the
/// eigenbasis is temperature independent, so it is built once per label and
/// reused across temperatures.
class ThermalQfiKernel {
 public:
  ThermalQfiKernel(const SpectrumResult& spectrum, CollectiveLabel label,
                   ThermalQfiOptions opts = {})
      : spectrum_(&spectrum), opts_(opts) {
    if (spectrum.mode != SpectrumResult::Mode::Full)
      throw std::invalid_argument("ThermalQfiKernel: full spectrum required");
    const std::size_t dim = spectrum.size();
    n_spins_ = static_cast<int>(std::round(std::log2(static_cast<double>(dim))));
    SparseOperator op = build_collective(label, n_spins_);
    const auto& V = spectrum.eigenvectors;
    Eigen::MatrixXd MV(V.rows(), V.cols());
    std::vector<double> y(dim);
    for (Eigen::Index c = 0; c < V.cols(); ++c) {
      op.apply(std::span<const double>(V.col(c).data(), dim), std::span<double>(y.data(), dim));
      for (std::size_t r = 0; r < dim; ++r) MV(static_cast<Eigen::Index>(r), c) = y[r];
    }
    a_ = V.transpose() * MV;
  }

  double density(double T) const {
    const std::size_t dim = spectrum_->size();
    const auto& E = spectrum_->eigenvalues;
    std::vector<double> p(dim, 0.0);
    if (T <= 0.0) {
      const std::size_t mu = spectrum_->cluster_end(0, opts_.coupling, opts_.t0_cluster_tol);
      for (std::size_t i = 0; i < mu; ++i) p[i] = 1.0 / static_cast<double>(mu);
    } else {
      double z = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        p[i] = std::exp(-(E[i] - E[0]) / T);
        z += p[i];
      }
      for (std::size_t i = 0; i < dim; ++i) p[i] /= z;
    }
    double F = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      if (p[k] < 0.5 * opts_.weight_cutoff) break;  // p is non-increasing
      for (std::size_t kp = k + 1; kp < dim; ++kp) {
        const double s = p[k] + p[kp];
        if (s < opts_.weight_cutoff) continue;
        const double d = p[k] - p[kp];
        const double amp = a_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(kp));
        F += 4.0 * (d * d / s) * amp * amp;
      }
    }
    return F / n_spins_;
  }

 private:
  const SpectrumResult* spectrum_;
  ThermalQfiOptions opts_;
  int n_spins_ = 0;
  Eigen::MatrixXd a_;
};

inline double qfi_thermal_label(const SpectrumResult& spectrum, double T, CollectiveLabel label,
                                ThermalQfiOptions opts = {}) {
  return ThermalQfiKernel(spectrum, label, opts).density(T);
}

struct ThermalQfiResult {
  double temperature = 0.0;
  std::array<double, 6> f_q{};
  double truncation_cutoff = 0.0;
  int ground_cluster_size = 1;
};

inline ThermalQfiResult qfi_thermal(const SpectrumResult& spectrum, double T,
                                    ThermalQfiOptions opts = {}) {
  ThermalQfiResult r;
  r.temperature = T;
  r.truncation_cutoff = opts.weight_cutoff;
  r.ground_cluster_size =
      static_cast<int>(spectrum.cluster_end(0, opts.coupling, opts.t0_cluster_tol));
  for (auto l : kAllLabels)
    r.f_q[static_cast<std::size_t>(label_index(l))] = qfi_thermal_label(spectrum, T, l, opts);
  return r;
}

}  // namespace lrising
