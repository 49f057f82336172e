#pragma once

#include <cmath>
#include <vector>

#include "lrising/core.hpp"
#include "lrising/sparse_operator.hpp"

namespace lrising {

/// Coupling kernel 1/|i-j|^alpha between sites i and j (1-based).
/// alpha = kAlphaInf means nearest-neighbor only.
inline double coupling_strength(int i, int j, double alpha, int n_spins = kMaxSpins) {
  if (i < 1 || j < 1 || i > n_spins || j > n_spins)
    throw std::domain_error("coupling_strength: site index out of range");
  if (i == j) throw std::domain_error("coupling_strength: i == j");
  const int d = std::abs(i - j);
  if (nearest_neighbor_only(alpha)) return d == 1 ? 1.0 : 0.0;
  return std::pow(static_cast<double>(d), -alpha);
}

/// Variable-range Ising Hamiltonian in the sig_z product basis.
/// Diagonal: J sin(theta) ZZ kernel plus the pinning field; off-diagonal:
/// one X flip per site with amplitude J cos(theta). flag = 1 (symmetric).
inline SparseOperator build_hamiltonian(const ChainParams& p) {
  p.validate();
  const int n = p.n_spins;
  const std::size_t dim = p.dim();

  // distance kernel, weighted by J sin(theta)
  std::vector<double> kernel(n, 0.0);  // kernel[d], d = |i-j|
  const double zz = p.coupling * std::sin(p.theta);
  for (int d = 1; d < n; ++d) kernel[d] = zz * coupling_strength(1, 1 + d, p.alpha, n);

  std::vector<double> diag(dim, 0.0);
  for (std::size_t b = 0; b < dim; ++b) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      const double si = sz_sign(b, i);
      for (int j = i + 1; j < n; ++j)
        if (kernel[j - i] != 0.0) e += kernel[j - i] * si * sz_sign(b, j);
    }
    e += p.sym_break_h * sz_sign(b, n - 1);  // site N
    diag[b] = e;
  }

  std::vector<FlipTerm> flips(n);
  const double x = p.coupling * std::cos(p.theta);
  for (int i = 0; i < n; ++i) flips[i] = {i, x, false};
  return SparseOperator(n, ImaginaryFactor::One, std::move(diag), std::move(flips));
}

/// Collective operator (1/2) sum_i (+-1)^i sig_axis^(i).
/// axis=y is returned as flag=i times an antisymmetric real matrix.
inline SparseOperator build_collective(CollectiveLabel label, int n_spins) {
  if (n_spins < 2) throw std::invalid_argument("build_collective: n_spins < 2");
  if (n_spins > kMaxSpins) throw CapacityError("build_collective: n_spins exceeds capacity");
  const std::size_t dim = std::size_t{1} << n_spins;

  // site i (1-based) carries (-1)^i when staggered
  auto site_sign = [&](int i0) {  // i0 = 0-based
    return label.staggered ? ((i0 + 1) % 2 == 0 ? 1.0 : -1.0) : 1.0;
  };

  if (label.axis == Axis::Z) {
    std::vector<double> diag(dim, 0.0);
    for (std::size_t b = 0; b < dim; ++b) {
      double m = 0.0;
      for (int i = 0; i < n_spins; ++i) m += site_sign(i) * sz_sign(b, i);
      diag[b] = 0.5 * m;
    }
    return SparseOperator(n_spins, ImaginaryFactor::One, std::move(diag), {});
  }

  std::vector<FlipTerm> flips(n_spins);
  const bool is_y = label.axis == Axis::Y;
  for (int i = 0; i < n_spins; ++i) flips[i] = {i, 0.5 * site_sign(i), is_y};
  return SparseOperator(n_spins, is_y ? ImaginaryFactor::I : ImaginaryFactor::One, {},
                        std::move(flips));
}

}  // namespace lrising
