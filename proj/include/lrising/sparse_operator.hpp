#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrising/core.hpp"

namespace lrising {

/// sig_z eigenvalue (+1/-1) of site `site` (0-based bit) in basis state b.
/// Bit 0 encodes spin up (+1), bit 1 spin down (-1).
inline double sz_sign(std::uint64_t b, int site) {
  return 1.0 - 2.0 * static_cast<double>((b >> site) & 1u);
}

/// One single-spin-flip term of an operator in the sig_z product basis.
/// Contributes  coeff * (sign_from_sz ? sz(b, site) : 1) * |b ^ (1<<site)><b|.
struct FlipTerm {
  int site = 0;
  double coeff = 0.0;
  bool sign_from_sz = false;  // true for sig_y-type terms
};

enum class ImaginaryFactor { One, I };

/// Real-matrix representation of a Hermitian operator on N spins:
/// physical operator = flag * M with M real, stored as a dense diagonal
/// plus single-flip off-diagonal structure generated on the fly during
/// matrix-vector products. flag=1 implies M symmetric, flag=i implies M
/// antisymmetric. Immutable after construction; apply() is reentrant.
class SparseOperator {
 public:
  SparseOperator(int n_spins, ImaginaryFactor flag, std::vector<double> diagonal,
                 std::vector<FlipTerm> flips)
      : n_spins_(n_spins),
        dim_(std::size_t{1} << n_spins),
        flag_(flag),
        diag_(std::move(diagonal)),
        flips_(std::move(flips)) {
    if (n_spins < 1 || n_spins > kMaxSpins)
      throw CapacityError("SparseOperator: n_spins out of range");
    if (!diag_.empty() && diag_.size() != dim_)
      throw std::invalid_argument("SparseOperator: diagonal size mismatch");
    if (flag_ == ImaginaryFactor::I && !diag_.empty())
      throw std::invalid_argument("SparseOperator: antisymmetric operator cannot have a diagonal");
  }

  int n_spins() const { return n_spins_; }
  std::size_t dim() const { return dim_; }
  ImaginaryFactor imaginary_factor() const { return flag_; }
  bool has_diagonal() const { return !diag_.empty(); }
  std::span<const double> diagonal() const { return diag_; }
  std::span<const FlipTerm> flip_terms() const { return flips_; }

  /// y = M x (the real matrix; the physical operator is flag * M).
  /// Gather form: deterministic and safe for concurrent use.
  void apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = dim_;
    if (x.size() != n || y.size() != n)
      throw std::invalid_argument("SparseOperator::apply: dimension mismatch");
    if (!diag_.empty()) {
      const double* d = diag_.data();
      for (std::size_t c = 0; c < n; ++c) y[c] = d[c] * x[c];
    } else {
      for (std::size_t c = 0; c < n; ++c) y[c] = 0.0;
    }
    for (const FlipTerm& t : flips_) {
      const std::uint64_t m = std::uint64_t{1} << t.site;
      const double a = t.coeff;
      if (t.sign_from_sz) {
        // M[c][c^m] = coeff * sz(c^m, site) = -coeff * sz(c, site)
        for (std::size_t c = 0; c < n; ++c)
          y[c] -= a * sz_sign(c, t.site) * x[c ^ m];
      } else {
        for (std::size_t c = 0; c < n; ++c) y[c] += a * x[c ^ m];
      }
    }
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(x.size());
    apply(x, y);
    return y;
  }

  /// Count of structurally nonzero off-diagonal entries of M.
  std::size_t off_diagonal_nnz() const { return flips_.size() * dim_; }

  struct Entry {
    std::uint64_t row, col;
    double value;
  };

  /// Materialized coordinate list (row-major, no explicit zeros).
  /// Guarded: only sensible for small dimensions.
  std::vector<Entry> coordinate_entries() const {
    if (n_spins_ > 14) throw CapacityError("coordinate_entries: dimension too large");
    std::vector<Entry> out;
    out.reserve((diag_.empty() ? 0 : dim_) + off_diagonal_nnz());
    for (std::uint64_t r = 0; r < dim_; ++r) {
      if (!diag_.empty() && diag_[r] != 0.0) out.push_back({r, r, diag_[r]});
      for (const FlipTerm& t : flips_) {
        const std::uint64_t c = r ^ (std::uint64_t{1} << t.site);
        const double v = t.coeff * (t.sign_from_sz ? sz_sign(c, t.site) : 1.0);
        if (v != 0.0) out.push_back({r, c, v});
      }
    }
    return out;
  }

  /// Crude upper estimate of the spectral radius of M (Gershgorin).
  double norm_estimate() const {
    double dmax = 0.0;
    for (double d : diag_) dmax = std::max(dmax, std::abs(d));
    double off = 0.0;
    for (const FlipTerm& t : flips_) off += std::abs(t.coeff);
    return dmax + off;
  }

 private:
  int n_spins_;
  std::size_t dim_;
  ImaginaryFactor flag_;
  std::vector<double> diag_;
  std::vector<FlipTerm> flips_;
};

/// Global spin-flip parity Pi = prod_i sig_x^(i): (Pi x)_b = x_{~b}.
inline void apply_parity(std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  for (std::size_t c = 0; c < n; ++c) y[c] = x[n - 1 - c];
}

/// Project a vector onto the even (Pi = +1) parity sector, in place.
inline void project_parity_even(std::span<double> x) {
  const std::size_t n = x.size();
  for (std::size_t c = 0; c < n / 2; ++c) {
    const double v = 0.5 * (x[c] + x[n - 1 - c]);
    x[c] = v;
    x[n - 1 - c] = v;
  }
}

}  // namespace lrising
