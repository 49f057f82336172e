#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lrising/core.hpp"
#include "lrising/hamiltonian.hpp"
#include "lrising/sparse_operator.hpp"

namespace lrising {

/// <state| O |state> for a real unit vector. Exactly zero for flag=i
/// operators (antisymmetric quadratic form).
inline double expectation(std::span<const double> state, const SparseOperator& op) {
  if (state.size() != op.dim())
    throw std::invalid_argument("expectation: dimension mismatch");
  if (op.imaginary_factor() == ImaginaryFactor::I) return 0.0;
  std::vector<double> y(state.size());
  op.apply(state, y);
  double acc = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) acc += state[i] * y[i];
  return acc;
}

/// Var(O) = <O^2> - <O>^2 on a real unit state. For flag=i, O = i M with M
/// antisymmetric: <O^2> = |M psi|^2 and <O> = 0.
inline double variance(std::span<const double> state, const SparseOperator& op) {
  if (state.size() != op.dim())
    throw std::invalid_argument("variance: dimension mismatch");
  std::vector<double> y(state.size());
  op.apply(state, y);
  double n2 = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    n2 += y[i] * y[i];
    mean += state[i] * y[i];
  }
  if (op.imaginary_factor() == ImaginaryFactor::I) return n2;
  return n2 - mean * mean;
}

/// Connected two-point functions C_ll^(i,j) for one axis on a pure state.
struct CorrelationMatrix {
  Axis axis = Axis::Z;
  int n_spins = 0;
  std::vector<double> values;  // row-major n x n
  std::string state_id;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n_spins + j]; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * n_spins + j]; }
};

/// C_ll^(i,j) = <sig_l^i sig_l^j> - <sig_l^i><sig_l^j> for all site pairs,
/// evaluated with direct bit kernels (no operator matrices are built):
///   l=z:  sum_b psi_b^2 s_i s_j
///   l=x:  sum_b psi_b psi_{b^ei^ej}
///   l=y:  -sum_b psi_b s_i s_j psi_{b^ei^ej}   (the i factors cancel)
inline CorrelationMatrix connected_correlations(std::span<const double> state, Axis axis,
                                                int n_spins, std::string state_id = {}) {
  const std::size_t dim = std::size_t{1} << n_spins;
  if (state.size() != dim)
    throw std::invalid_argument("connected_correlations: dimension mismatch");
  CorrelationMatrix c;
  c.axis = axis;
  c.n_spins = n_spins;
  c.state_id = std::move(state_id);
  c.values.assign(static_cast<std::size_t>(n_spins) * n_spins, 0.0);

  std::vector<double> mean(n_spins, 0.0);
  std::vector<double> raw(static_cast<std::size_t>(n_spins) * n_spins, 0.0);

  if (axis == Axis::Z) {
    for (std::size_t b = 0; b < dim; ++b) {
      const double w = state[b] * state[b];
      for (int i = 0; i < n_spins; ++i) {
        const double si = sz_sign(b, i);
        mean[i] += w * si;
        for (int j = i + 1; j < n_spins; ++j)
          raw[static_cast<std::size_t>(i) * n_spins + j] += w * si * sz_sign(b, j);
      }
    }
  } else if (axis == Axis::X) {
    for (int i = 0; i < n_spins; ++i) {
      const std::uint64_t mi = std::uint64_t{1} << i;
      double m = 0.0;
      for (std::size_t b = 0; b < dim; ++b) m += state[b] * state[b ^ mi];
      mean[i] = m;
      for (int j = i + 1; j < n_spins; ++j) {
        const std::uint64_t mm = mi | (std::uint64_t{1} << j);
        double e = 0.0;
        for (std::size_t b = 0; b < dim; ++b) e += state[b] * state[b ^ mm];
        raw[static_cast<std::size_t>(i) * n_spins + j] = e;
      }
    }
  } else {  // Axis::Y, real states: means vanish
    for (int i = 0; i < n_spins; ++i) {
      const std::uint64_t mi = std::uint64_t{1} << i;
      for (int j = i + 1; j < n_spins; ++j) {
        const std::uint64_t mm = mi | (std::uint64_t{1} << j);
        double e = 0.0;
        for (std::size_t b = 0; b < dim; ++b)
          e -= state[b] * sz_sign(b, i) * sz_sign(b, j) * state[b ^ mm];
        raw[static_cast<std::size_t>(i) * n_spins + j] = e;
      }
    }
  }

  for (int i = 0; i < n_spins; ++i) {
    c.at(i, i) = 1.0 - mean[i] * mean[i];  // sig^2 = 1
    for (int j = i + 1; j < n_spins; ++j) {
      const double v = raw[static_cast<std::size_t>(i) * n_spins + j] - mean[i] * mean[j];
      c.at(i, j) = v;
      c.at(j, i) = v;
    }
  }
  return c;
}

/// Raw (not connected) <sig_z^i sig_z^j>, 0-based sites.
inline double sz_pair_expectation(std::span<const double> state, int i, int j) {
  double e = 0.0;
  for (std::size_t b = 0; b < state.size(); ++b)
    e += state[b] * state[b] * sz_sign(b, i) * sz_sign(b, j);
  return e;
}

/// Order parameters Phi_z = <J_z>, Phi_z_st = <J_z^(st)> (1/2 convention).
struct OrderParameters {
  double phi_z = 0.0;
  double phi_z_st = 0.0;
};

inline OrderParameters order_parameters(std::span<const double> state, int n_spins) {
  OrderParameters o;
  o.phi_z = expectation(state, build_collective({Axis::Z, false}, n_spins));
  o.phi_z_st = expectation(state, build_collective({Axis::Z, true}, n_spins));
  return o;
}

}  // namespace lrising
