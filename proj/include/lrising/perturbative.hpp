#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lrising/core.hpp"

namespace lrising {

/// Generalized harmonic number H_{N,alpha} = sum_{k=1}^N k^(-alpha).
/// alpha may be negative; alpha = inf gives 1 (only the k=1 term survives).
inline double harmonic_number(long n, double alpha) {
  if (n < 1) throw std::domain_error("harmonic_number: N >= 1 required");
  if (nearest_neighbor_only(alpha)) return 1.0;
  double s = 0.0;
  for (long k = n; k >= 1; --k) s += std::pow(static_cast<double>(k), -alpha);
  return s;
}

/// d/dalpha H_{N,alpha} = -sum_k ln(k) k^(-alpha).
inline double harmonic_number_dalpha(long n, double alpha) {
  if (n < 1) throw std::domain_error("harmonic_number_dalpha: N >= 1 required");
  double s = 0.0;
  for (long k = n; k >= 2; --k)
    s -= std::log(static_cast<double>(k)) * std::pow(static_cast<double>(k), -alpha);
  return s;
}

/// Riemann zeta via truncated sum plus Euler-Maclaurin tail,
/// zeta(a) = H_{K,a} + K^(1-a)/(a-1) - K^(-a)/2 + (a/12) K^(-a-1),
/// accurate to better than 1e-10 relative for a >= 1.05. K = 1e4.
inline double riemann_zeta(double alpha) {
  if (nearest_neighbor_only(alpha)) return 1.0;
  if (!(alpha > 1.0)) throw std::domain_error("riemann_zeta: requires alpha > 1");
  constexpr long K = 10000;
  const double kd = static_cast<double>(K);
  return harmonic_number(K, alpha) + std::pow(kd, 1.0 - alpha) / (alpha - 1.0) -
         0.5 * std::pow(kd, -alpha) + alpha / 12.0 * std::pow(kd, -alpha - 1.0);
}

/// d zeta / d alpha by the same tail construction.
inline double riemann_zeta_dalpha(double alpha) {
  if (!(alpha > 1.0)) throw std::domain_error("riemann_zeta_dalpha: requires alpha > 1");
  constexpr long K = 10000;
  const double kd = static_cast<double>(K);
  const double lk = std::log(kd);
  // differentiate each tail term in alpha
  return harmonic_number_dalpha(K, alpha) +
         std::pow(kd, 1.0 - alpha) * (-lk / (alpha - 1.0) - 1.0 / ((alpha - 1.0) * (alpha - 1.0))) +
         0.5 * lk * std::pow(kd, -alpha) +
         (1.0 / 12.0) * std::pow(kd, -alpha - 1.0) * (1.0 - alpha * lk);
}

/// G_N(alpha) = (N H_{N,alpha} - H_{N,alpha-1}) / sqrt(8 N (N-1)).
inline double g_function(long n, double alpha) {
  if (n < 2) throw std::domain_error("g_function: N >= 2 required");
  const double num = static_cast<double>(n) * harmonic_number(n, alpha) -
                     harmonic_number(n, nearest_neighbor_only(alpha) ? alpha : alpha - 1.0);
  return num / std::sqrt(8.0 * static_cast<double>(n) * static_cast<double>(n - 1));
}

/// Large-N asymptotics of G_N(alpha):
/// (1/sqrt(8)) * { zeta(alpha)        for alpha > 1
///               , log(N)             for alpha = 1
///               , N^(1-alpha)/((1-alpha)(2-alpha))  for 0 <= alpha < 1 }.
inline double g_asymptotic(double n, double alpha) {
  const double r8 = std::sqrt(8.0);
  if (nearest_neighbor_only(alpha) || alpha > 1.0) return riemann_zeta(alpha) / r8;
  if (alpha == 1.0) return std::log(n) / r8;
  return std::pow(n, 1.0 - alpha) / ((1.0 - alpha) * (2.0 - alpha)) / r8;
}

/// Exact d G_N / d alpha from log-weighted sums. Zero for N = 2.
inline double g_alpha_derivative(long n, double alpha) {
  if (n < 2) throw std::domain_error("g_alpha_derivative: N >= 2 required");
  if (nearest_neighbor_only(alpha)) return 0.0;
  const double num = static_cast<double>(n) * harmonic_number_dalpha(n, alpha) -
                     harmonic_number_dalpha(n, alpha - 1.0);
  return num / std::sqrt(8.0 * static_cast<double>(n) * static_cast<double>(n - 1));
}

/// Leading-order reference for d G_N / d alpha, reproduced literally
/// (including its conventions) from the published asymptotic form:
/// d zeta/d alpha for alpha > 1, N^(1-alpha) log(N) / ((alpha-1)(alpha-2))
/// for 0 < alpha < 1. The exact-sum derivative above is the primary output.
inline double g_alpha_derivative_asymptotic(double n, double alpha) {
  if (alpha > 1.0) return riemann_zeta_dalpha(alpha);
  if (alpha <= 0.0 || alpha == 1.0)
    throw std::domain_error("g_alpha_derivative_asymptotic: 0 < alpha < 1 or alpha > 1");
  return std::pow(n, 1.0 - alpha) * std::log(n) / ((alpha - 1.0) * (alpha - 2.0));
}

/// Small-theta closed forms of the QFI density for all six collective
/// operators, built on the symmetric-excitation approximation of the
/// first-order ground state. Exact to O(theta) for the uniform y/z
/// operators; the staggered forms share the symmetric projection and are
/// exact at alpha = 0 only.
struct PerturbativePrediction {
  double g_value = 0.0;
  std::array<double, 6> qfi{};  // indexed by label_index()
  bool validity = true;         // |theta| G_N(alpha) < 0.1

  double operator[](CollectiveLabel l) const { return qfi[static_cast<std::size_t>(label_index(l))]; }
};

inline PerturbativePrediction perturbative_qfi(long n, double alpha, double theta) {
  PerturbativePrediction p;
  const double g = g_function(n, alpha);
  p.g_value = g;
  p.validity = std::abs(theta) * g < 0.1;
  const double nd = static_cast<double>(n);
  const double cu = theta * std::sqrt(8.0 * (nd - 1.0) / nd) * g;       // uniform slope
  const double cs = theta * std::sqrt(8.0 / (nd * (nd - 1.0))) * g;     // staggered slope
  const double fx = 8.0 / nd * theta * theta * g * g;
  p.qfi[label_index({Axis::X, false})] = fx;
  p.qfi[label_index({Axis::X, true})] = fx;
  p.qfi[label_index({Axis::Y, false})] = 1.0 + cu;
  p.qfi[label_index({Axis::Z, false})] = 1.0 - cu;
  p.qfi[label_index({Axis::Y, true})] = 1.0 - cs;
  p.qfi[label_index({Axis::Z, true})] = 1.0 + cs;
  return p;
}

/// Second-order energies and large-N gaps:
///   E_gs^(2)/J = -N - 4 theta^2 G^2
///   E_ex^(2)/J = 2 - N + 2 theta sqrt(8(N-1)/N) G - 12 (N-2)/N theta^2 G^2
///   Delta^(1) = 2 + 2 theta zeta(alpha),  Delta^(2) = Delta^(1) - theta^2 zeta^2
/// (the Delta forms require alpha > 1).
struct PerturbativeEnergies {
  double e_gs2 = 0.0;
  double e_ex2 = 0.0;
  double gap1 = std::numeric_limits<double>::quiet_NaN();
  double gap2 = std::numeric_limits<double>::quiet_NaN();
};

/// with_gaps requests the large-N Delta^(1), Delta^(2); those require
/// alpha > 1 (zeta divergent otherwise) and throw on violation.
inline PerturbativeEnergies perturbative_energies(long n, double alpha, double theta,
                                                  bool with_gaps = true) {
  PerturbativeEnergies e;
  const double g = g_function(n, alpha);
  const double nd = static_cast<double>(n);
  e.e_gs2 = -nd - 4.0 * theta * theta * g * g;
  e.e_ex2 = 2.0 - nd + 2.0 * theta * std::sqrt(8.0 * (nd - 1.0) / nd) * g -
            12.0 * (nd - 2.0) / nd * theta * theta * g * g;
  if (with_gaps) {
    if (!nearest_neighbor_only(alpha) && alpha <= 1.0)
      throw std::domain_error("perturbative_energies: large-N gaps require alpha > 1");
    const double z = riemann_zeta(alpha);
    e.gap1 = 2.0 + 2.0 * theta * z;
    e.gap2 = 2.0 + 2.0 * theta * z - theta * theta * z * z;
  }
  return e;
}

/// Ferromagnetic critical line from the vanishing of the perturbative gap:
/// order 1: -1/zeta(alpha); order 2: -(sqrt(3)-1)/zeta(alpha). For
/// alpha <= 1 the thermodynamic critical point is 0 (flagged).
struct FmCriticalTheta {
  double theta_c = 0.0;
  bool long_range_zero = false;  // alpha <= 1: theta_c = 0 in the N -> inf limit
};

inline FmCriticalTheta fm_critical_line(double alpha, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("fm_critical_line: order must be 1 or 2");
  if (!nearest_neighbor_only(alpha) && alpha <= 1.0) return {0.0, true};
  const double z = riemann_zeta(alpha);
  return {order == 1 ? -1.0 / z : -(std::sqrt(3.0) - 1.0) / z, false};
}

/// Finite-size ferromagnetic pseudo-critical angle for alpha <= 1:
/// -1/N^(1-alpha) (alpha < 1), -1/log N (alpha = 1).
inline double finite_size_fm_theta(double n, double alpha) {
  if (alpha > 1.0 || nearest_neighbor_only(alpha))
    throw std::domain_error("finite_size_fm_theta: requires alpha <= 1 (use fm_critical_line)");
  if (alpha == 1.0) return -1.0 / std::log(n);
  return -std::pow(n, alpha - 1.0);
}

/// Fidelity susceptibility chi_alpha = theta^2 (d G_N / d alpha)^2.
inline double fidelity_susceptibility(long n, double alpha, double theta) {
  const double d = g_alpha_derivative(n, alpha);
  return theta * theta * d * d;
}

}  // namespace lrising
