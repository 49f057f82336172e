#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lrising {

/// Largest chain the toolkit accepts (2^24 basis states).
inline constexpr int kMaxSpins = 24;

/// Decay power sentinel for nearest-neighbor-only coupling.
inline constexpr double kAlphaInf = std::numeric_limits<double>::infinity();

inline bool nearest_neighbor_only(double alpha) { return std::isinf(alpha); }

/// Requested problem exceeds the configured capacity (N, dimension, ...).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative eigensolver did not reach the requested residual.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual(best_residual) {}
  double best_residual;
};

/// Spin squeezing is undefined when the mean spin vanishes.
class SqueezingUndefinedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full specification of one Hamiltonian instance:
///   H = J sin(theta) sum_{i<j} sig_z^i sig_z^j / |i-j|^alpha
///     + J cos(theta) sum_i sig_x^i + h sig_z^(N).
/// alpha = kAlphaInf selects nearest-neighbor-only coupling.
struct ChainParams {
  int n_spins = 2;
  double alpha = kAlphaInf;
  double theta = 0.0;
  double coupling = 1.0;     // energy scale J > 0
  double sym_break_h = 0.0;  // longitudinal pinning field on site N

  void validate() const {
    if (n_spins < 2 || n_spins % 2 != 0)
      throw std::invalid_argument("n_spins must be even and >= 2");
    if (n_spins > kMaxSpins)
      throw CapacityError("n_spins exceeds capacity " + std::to_string(kMaxSpins));
    if (!(alpha >= 0.0))  // NaN rejected too
      throw std::invalid_argument("alpha must be >= 0 (or inf)");
    constexpr double half_pi = 1.5707963267948966;
    if (!(theta >= -half_pi && theta <= half_pi))
      throw std::invalid_argument("theta must lie in [-pi/2, pi/2]");
    if (!(coupling > 0.0)) throw std::invalid_argument("coupling must be positive");
    if (!(sym_break_h >= 0.0)) throw std::invalid_argument("sym_break_h must be >= 0");
  }

  std::size_t dim() const { return std::size_t{1} << n_spins; }
};

enum class Axis : int { X = 0, Y = 1, Z = 2 };

/// One of the six collective operators J_l, J_l^(st), l in {x,y,z}.
/// Convention: J_l = (1/2) sum_i sig_l^(i), staggered sign (-1)^i with
/// sites numbered 1..N (the global sign of the staggered operators is
/// irrelevant to every variance/QFI quantity computed here).
struct CollectiveLabel {
  Axis axis = Axis::Z;
  bool staggered = false;

  friend bool operator==(const CollectiveLabel&, const CollectiveLabel&) = default;
};

inline constexpr std::array<CollectiveLabel, 6> kAllLabels = {{
    {Axis::X, false},
    {Axis::Y, false},
    {Axis::Z, false},
    {Axis::X, true},
    {Axis::Y, true},
    {Axis::Z, true},
}};

inline int label_index(CollectiveLabel l) {
  return static_cast<int>(l.axis) + (l.staggered ? 3 : 0);
}

inline std::string to_string(CollectiveLabel l) {
  static constexpr std::array<const char*, 3> ax = {"x", "y", "z"};
  std::string s = ax[static_cast<int>(l.axis)];
  if (l.staggered) s += "_st";
  return s;
}

inline CollectiveLabel parse_label(std::string_view s) {
  for (auto l : kAllLabels)
    if (to_string(l) == s) return l;
  throw std::invalid_argument("unknown collective label: " + std::string(s));
}

}  // namespace lrising
