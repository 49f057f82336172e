#pragma once

#include <cmath>
#include <stdexcept>
#include <string_view>

#include "lrising/core.hpp"

namespace lrising {

/// Gaussian-ansatz energy for the fully connected chain (alpha = 0):
/// E/(2J) = s2 sin(theta) - (N/2) cos(theta) [1 - (2/N^2)(s2 - 1/4)] e^(-1/(8 s2)).
inline double variational_energy(double n, double theta, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("variational_energy: sigma2 must be positive");
  if (!(theta >= 0.0 && theta < 1.5707963267948966))
    throw std::domain_error("variational_energy: theta in [0, pi/2) required");
  return sigma2 * std::sin(theta) -
         0.5 * n * std::cos(theta) * (1.0 - 2.0 / (n * n) * (sigma2 - 0.25)) *
             std::exp(-1.0 / (8.0 * sigma2));
}

enum class VariationalRegime { Rabi, Josephson, Fock };

inline std::string_view to_string(VariationalRegime r) {
  switch (r) {
    case VariationalRegime::Rabi: return "rabi";
    case VariationalRegime::Fock: return "fock";
    default: return "josephson";
  }
}

/// Rabi for tan(theta) < 1/N, Fock for tan(theta) > N, Josephson between
/// (boundaries inclusive to Josephson).
inline VariationalRegime classify_regime(double n, double theta) {
  if (!(theta >= 0.0 && theta < 1.5707963267948966))
    throw std::domain_error("classify_regime: theta in [0, pi/2) required");
  const double t = std::tan(theta);
  if (t < 1.0 / n) return VariationalRegime::Rabi;
  if (t > n) return VariationalRegime::Fock;
  return VariationalRegime::Josephson;
}

struct VariationalSolution {
  double sigma2 = 0.0;             // width: bracketed root, or closed form on fallback
  double sigma2_closed = 0.0;      // (N/4) / sqrt(1 + N tan(theta))
  double energy = 0.0;             // variational energy at sigma2
  double qfi_y = 0.0;              // regime-aware prediction for f_Q[J_y]
  double qfi_y_closed = 0.0;       // sqrt(1 + N tan(theta))
  VariationalRegime regime = VariationalRegime::Rabi;
  bool root_bracketed = true;      // false: fell back to the closed form
  bool bracket_monotone = true;    // single sign change found on the scan
};

/// Stationarity condition d E / d sigma2 = 0:
/// e^(-1/(8 s2)) (N/(16 s2^2) - 1/(8 N s2) - 1/N) cos(theta) = sin(theta),
/// solved by bisection for the largest root in (1e-3, N/4] (the energy
/// minimum; a second sign change at small s2 is the matching maximum).
inline VariationalSolution solve_sigma(double n, double theta) {
  if (n < 4) throw std::domain_error("solve_sigma: N >= 4 required");
  if (!(theta >= 0.0 && theta < 1.5707963267948966))
    throw std::domain_error("solve_sigma: theta in [0, pi/2) required");

  VariationalSolution sol;
  sol.regime = classify_regime(n, theta);
  const double tn = std::tan(theta);
  sol.sigma2_closed = 0.25 * n / std::sqrt(1.0 + n * tn);
  sol.qfi_y_closed = std::sqrt(1.0 + n * tn);
  sol.qfi_y = sol.regime == VariationalRegime::Fock ? 0.5 * n + 1.0 : sol.qfi_y_closed;

  const auto g = [&](double s2) {
    return std::exp(-1.0 / (8.0 * s2)) *
               (n / (16.0 * s2 * s2) - 1.0 / (8.0 * n * s2) - 1.0 / n) * std::cos(theta) -
           std::sin(theta);
  };

  // geometric scan from the right for the outermost sign change
  const double lo = 1e-3, hi = 0.25 * n;
  constexpr int kScan = 400;
  double a = hi, ga = g(hi);
  double b = 0.0;
  bool found = false;
  int crossings = 0;
  const double ratio = std::pow(lo / hi, 1.0 / kScan);
  double x = hi;
  double prev = ga, prev_x = hi;
  for (int i = 1; i <= kScan; ++i) {
    x = hi * std::pow(ratio, i);
    const double gx = g(x);
    if (prev * gx <= 0.0 && (prev != 0.0 || gx != 0.0)) {
      ++crossings;
      if (!found) {
        a = x;
        b = prev_x;
        found = true;
      }
    }
    prev = gx;
    prev_x = x;
  }
  sol.bracket_monotone = crossings <= 2;

  if (!found) {
    sol.root_bracketed = false;
    sol.sigma2 = sol.sigma2_closed;
  } else {
    // bisection to relative 1e-10 on sigma2
    double fa = g(a);
    for (int it = 0; it < 200 && (b - a) > 1e-10 * b; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = g(m);
      if (fa * fm <= 0.0) {
        b = m;
      } else {
        a = m;
        fa = fm;
      }
    }
    sol.sigma2 = 0.5 * (a + b);
  }
  sol.energy = variational_energy(n, theta, sol.sigma2);
  return sol;
}

}  // namespace lrising
