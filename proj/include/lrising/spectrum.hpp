#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "lrising/core.hpp"
#include "lrising/hamiltonian.hpp"
#include "lrising/sparse_operator.hpp"

namespace lrising {

/// Relative tolerance used to group quasi-degenerate levels:
/// (E_k - E_0) / max(|E_0|, coupling) below this is one cluster.
inline constexpr double kDegeneracyTol = 1e-8;

struct SpectrumResult {
  enum class Mode { Full, Partial };

  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;     // one column per eigenvalue
  double degeneracy_tol = kDegeneracyTol;
  Mode mode = Mode::Full;
  std::vector<int> parity;  // +1 / -1 per column, 0 when unresolved

  // solver metadata
  std::uint64_t seed = 0;
  long matvecs = 0;
  double max_residual = 0.0;

  std::size_t size() const { return eigenvalues.size(); }

  double cluster_scale(double coupling = 1.0) const {
    return std::max(std::abs(eigenvalues.empty() ? 0.0 : eigenvalues[0]), coupling);
  }

  /// One past the quasi-degenerate cluster starting at index i0
  /// (maximal chain of consecutive spacings below tol * scale).
  std::size_t cluster_end(std::size_t i0, double coupling = 1.0, double tol = -1.0) const {
    if (tol < 0) tol = degeneracy_tol;
    const double scale = cluster_scale(coupling);
    std::size_t i = i0 + 1;
    while (i < size() && (eigenvalues[i] - eigenvalues[i - 1]) < tol * scale) ++i;
    return i;
  }
};

struct LanczosOptions {
  double tol = 1e-10;        // Ritz-residual tolerance (relative)
  int max_basis = 56;        // thick-restart basis cap
  int keep_on_restart = 12;  // Ritz vectors retained at restart
  long max_matvecs = 20000;
  std::uint64_t seed = 0x5eed1234abcdULL;
  bool even_sector = false;    // restrict to the Pi = +1 parity sector
  bool resolve_parity = true;  // rotate degenerate clusters into Pi eigenstates (h=0 only)
  double coupling = 1.0;       // energy scale for degeneracy grouping
};

namespace detail {

inline Eigen::VectorXd random_vector(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = u(rng);
  return v;
}

/// Sign convention: largest-magnitude amplitude positive (first on ties).
inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  double mag = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > mag + 1e-14) {
      mag = a;
      best = i;
    }
  }
  if (v[best] < 0.0) v = -v;
}

/// Rotate quasi-degenerate clusters into parity eigenstates and label them.
/// Valid only when the operator commutes with Pi (h = 0). A cluster touching
/// the end of a partial window may be incomplete and is left unrotated.
inline void resolve_parity_clusters(SpectrumResult& r, double coupling, bool window_complete) {
  const std::size_t n = r.size();
  r.parity.assign(n, 0);
  const std::size_t dim = static_cast<std::size_t>(r.eigenvectors.rows());
  Eigen::VectorXd tmp(static_cast<Eigen::Index>(dim));
  std::size_t i = 0;
  while (i < n) {
    const std::size_t j = r.cluster_end(i, coupling);
    const std::size_t s = j - i;
    const bool at_edge = (j == n) && !window_complete && s > 1;
    if (s > 512 || at_edge) {
      for (std::size_t a = i; a < j; ++a)
        fix_sign(r.eigenvectors.col(static_cast<Eigen::Index>(a)));
      i = j;
      continue;
    }
    const auto si = static_cast<Eigen::Index>(i);
    const auto ss = static_cast<Eigen::Index>(s);
    Eigen::MatrixXd P(ss, ss);
    for (Eigen::Index a = 0; a < ss; ++a) {
      apply_parity(std::span<const double>(r.eigenvectors.col(si + a).data(), dim),
                   std::span<double>(tmp.data(), dim));
      for (Eigen::Index b = a; b < ss; ++b) {
        P(a, b) = r.eigenvectors.col(si + b).dot(tmp);
        P(b, a) = P(a, b);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
    r.eigenvectors.middleCols(si, ss) = (r.eigenvectors.middleCols(si, ss) * es.eigenvectors()).eval();
    for (Eigen::Index a = 0; a < ss; ++a) {
      const double pv = es.eigenvalues()[a];
      if (std::abs(std::abs(pv) - 1.0) < 1e-6) r.parity[i + a] = pv > 0 ? 1 : -1;
      fix_sign(r.eigenvectors.col(si + a));
    }
    i = j;
  }
}

inline Eigen::MatrixXd materialize_dense(const SparseOperator& op) {
  const std::size_t dim = op.dim();
  Eigen::MatrixXd H(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::vector<double> e(dim, 0.0), col(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    e[c] = 1.0;
    op.apply(e, col);
    for (std::size_t r = 0; r < dim; ++r)
      H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
    e[c] = 0.0;
  }
  return H;
}

}  // namespace detail

/// All eigenpairs of a flag=1 operator, ascending (dense solve).
inline SpectrumResult full_spectrum(const SparseOperator& op, bool resolve_parity = true,
                                    double coupling = 1.0) {
  if (op.imaginary_factor() != ImaginaryFactor::One)
    throw std::invalid_argument("full_spectrum: operator must be flag=1 (real symmetric)");
  if (op.dim() > (std::size_t{1} << 14))
    throw CapacityError("full_spectrum: dimension exceeds 2^14");
  Eigen::MatrixXd H = detail::materialize_dense(op);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  SpectrumResult r;
  r.mode = SpectrumResult::Mode::Full;
  r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  r.eigenvectors = es.eigenvectors();
  if (resolve_parity) {
    detail::resolve_parity_clusters(r, coupling, /*window_complete=*/true);
  } else {
    r.parity.assign(r.size(), 0);
    for (Eigen::Index c = 0; c < r.eigenvectors.cols(); ++c)
      detail::fix_sign(r.eigenvectors.col(c));
  }
  return r;
}

/// Lowest k eigenpairs via thick-restart Lanczos with full
/// reorthogonalization and sequential locking; deterministic for a fixed
/// seed. Quasi-degenerate multiplets are recovered by deflation (each locked
/// pair removes one direction; the next run starts from a fresh vector
/// orthogonal to the locked set). Falls back to a dense solve when the
/// dimension is small.
inline SpectrumResult lowest_eigenpairs(const SparseOperator& op, int k, double tol = 1e-10,
                                        LanczosOptions opts = {}) {
  const std::size_t dim = op.dim();
  if (k < 1) throw std::invalid_argument("lowest_eigenpairs: k < 1");
  if (static_cast<std::size_t>(k) > dim) throw std::invalid_argument("lowest_eigenpairs: k > dim");
  opts.tol = tol;

  SpectrumResult r;
  r.mode = SpectrumResult::Mode::Partial;
  r.seed = opts.seed;

  if (dim <= 512 || static_cast<std::size_t>(4 * k) >= dim) {
    SpectrumResult full =
        full_spectrum(op, opts.resolve_parity || opts.even_sector, opts.coupling);
    std::vector<Eigen::Index> sel;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(full.size()); ++i) {
      if (opts.even_sector && full.parity[static_cast<std::size_t>(i)] != 1) continue;
      sel.push_back(i);
      if (static_cast<int>(sel.size()) == k) break;
    }
    r.eigenvalues.resize(sel.size());
    r.eigenvectors.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(sel.size()));
    r.parity.resize(sel.size());
    for (std::size_t i = 0; i < sel.size(); ++i) {
      r.eigenvalues[i] = full.eigenvalues[static_cast<std::size_t>(sel[i])];
      r.eigenvectors.col(static_cast<Eigen::Index>(i)) = full.eigenvectors.col(sel[i]);
      r.parity[i] = full.parity[static_cast<std::size_t>(sel[i])];
    }
    if (!opts.resolve_parity && !opts.even_sector) r.parity.assign(sel.size(), 0);
    return r;
  }

  const auto project = [&](Eigen::VectorXd& v) {
    if (opts.even_sector)
      project_parity_even(std::span<double>(v.data(), static_cast<std::size_t>(v.size())));
  };

  const double norm_est = op.norm_estimate();
  const int m_max = std::max(opts.max_basis, 12);
  Eigen::MatrixXd V(static_cast<Eigen::Index>(dim), m_max);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m_max, m_max);
  Eigen::MatrixXd locked(static_cast<Eigen::Index>(dim), k);
  std::vector<double> locked_vals;
  long matvecs = 0;
  double last_residual = 0.0;

  Eigen::VectorXd w(static_cast<Eigen::Index>(dim));
  int seed_bump = 0;
  while (static_cast<int>(locked_vals.size()) < k) {
    const int target = static_cast<int>(locked_vals.size());
    Eigen::VectorXd v = detail::random_vector(
        dim, opts.seed + 1000003ULL * static_cast<std::uint64_t>(target) +
                 7919ULL * static_cast<std::uint64_t>(seed_bump));
    project(v);
    for (int pass = 0; pass < 2; ++pass)
      for (int l = 0; l < target; ++l) v -= locked.col(l).dot(v) * locked.col(l);
    const double nv = v.norm();
    if (nv < 1e-10) {
      ++seed_bump;
      continue;
    }
    v /= nv;

    int m = 0;
    bool done = false;
    bool retry = false;
    while (!done && !retry) {
      if (matvecs > opts.max_matvecs)
        throw ConvergenceError("lowest_eigenpairs: matvec budget exhausted", last_residual);
      V.col(m) = v;
      op.apply(std::span<const double>(v.data(), dim), std::span<double>(w.data(), dim));
      ++matvecs;
      project(w);
      // full Rayleigh column (T stays exact through thick restarts)
      for (int i = 0; i <= m; ++i) {
        const double t = V.col(i).dot(w);
        T(i, m) = t;
        T(m, i) = t;
      }
      for (int pass = 0; pass < 2; ++pass) {
        for (int l = 0; l < target; ++l) w -= locked.col(l).dot(w) * locked.col(l);
        for (int i = 0; i <= m; ++i) w -= V.col(i).dot(w) * V.col(i);
      }
      const double beta = w.norm();
      ++m;

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(m, m));
      const double theta = es.eigenvalues()[0];
      const double resid = beta * std::abs(es.eigenvectors().col(0)[m - 1]);
      const double scale = std::max(1.0, std::abs(theta));
      last_residual = resid;

      if ((resid <= opts.tol * scale && m >= 2) ||
          (beta <= 1e-14 * std::max(1.0, norm_est) && m >= 2)) {
        Eigen::VectorXd u = V.leftCols(m) * es.eigenvectors().col(0);
        u.normalize();
        locked.col(target) = u;
        locked_vals.push_back(theta);
        done = true;
      } else if (beta <= 1e-14 * std::max(1.0, norm_est)) {
        ++seed_bump;  // invariant subspace before convergence: fresh start
        retry = true;
      } else if (m == m_max) {
        const int keep = std::min(opts.keep_on_restart, m - 2);
        const Eigen::MatrixXd Y = es.eigenvectors().leftCols(keep);
        const Eigen::MatrixXd kept = V.leftCols(m) * Y;
        V.leftCols(keep) = kept;
        T.setZero();
        for (int i = 0; i < keep; ++i) T(i, i) = es.eigenvalues()[i];
        v = w / beta;
        m = keep;  // the Rayleigh column of the next vector restores the coupling row
      } else {
        v = w / beta;
      }
    }
  }

  std::vector<int> idx(locked_vals.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return locked_vals[a] < locked_vals[b]; });
  r.eigenvalues.resize(locked_vals.size());
  r.eigenvectors.resize(static_cast<Eigen::Index>(dim),
                        static_cast<Eigen::Index>(locked_vals.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    r.eigenvalues[i] = locked_vals[static_cast<std::size_t>(idx[i])];
    r.eigenvectors.col(static_cast<Eigen::Index>(i)) = locked.col(idx[i]);
  }
  r.matvecs = matvecs;
  double max_res = 0.0;
  for (Eigen::Index c = 0; c < r.eigenvectors.cols(); ++c) {
    op.apply(std::span<const double>(r.eigenvectors.col(c).data(), dim),
             std::span<double>(w.data(), dim));
    max_res = std::max(max_res,
                       (w - r.eigenvalues[static_cast<std::size_t>(c)] * r.eigenvectors.col(c)).norm());
  }
  r.max_residual = max_res;
  if (opts.resolve_parity && !opts.even_sector) {
    detail::resolve_parity_clusters(r, opts.coupling, /*window_complete=*/false);
  } else {
    r.parity.assign(r.size(), opts.even_sector ? 1 : 0);
    for (Eigen::Index c = 0; c < r.eigenvectors.cols(); ++c)
      detail::fix_sign(r.eigenvectors.col(c));
  }
  return r;
}

/// Mass gap: first level above the mu-fold ground cluster (absolute
/// spectrum, quasi-degeneracies grouped at degeneracy_tol).
struct GapResult {
  double gap = 0.0;
  int ground_degeneracy = 1;   // mu
  int excited_degeneracy = 1;  // nu
  double ground_energy = 0.0;
  bool excited_truncated = false;  // nu count hit the computed window
};

/// Ground-cluster solve for a parameter set.
inline SpectrumResult ground_spectrum(const ChainParams& p, int k = 2, LanczosOptions opts = {}) {
  p.validate();
  SparseOperator H = build_hamiltonian(p);
  opts.coupling = p.coupling;
  opts.resolve_parity = (p.sym_break_h == 0.0);
  return lowest_eigenpairs(H, k, opts.tol, opts);
}

inline GapResult mass_gap(const ChainParams& p, double degeneracy_tol = kDegeneracyTol,
                          LanczosOptions opts = {}) {
  p.validate();
  SparseOperator H = build_hamiltonian(p);
  opts.coupling = p.coupling;
  opts.resolve_parity = (p.sym_break_h == 0.0);
  int k = 6;
  for (;;) {
    SpectrumResult s =
        lowest_eigenpairs(H, static_cast<int>(std::min<std::size_t>(k, H.dim())), opts.tol, opts);
    s.degeneracy_tol = degeneracy_tol;
    const std::size_t mu_end = s.cluster_end(0, p.coupling);
    if (mu_end < s.size()) {
      GapResult g;
      g.ground_energy = s.eigenvalues[0];
      g.ground_degeneracy = static_cast<int>(mu_end);
      g.gap = s.eigenvalues[mu_end] - s.eigenvalues[0];
      const double scale = s.cluster_scale(p.coupling);
      std::size_t nu_end = mu_end + 1;
      while (nu_end < s.size() &&
             (s.eigenvalues[nu_end] - s.eigenvalues[nu_end - 1]) < degeneracy_tol * scale)
        ++nu_end;
      g.excited_degeneracy = static_cast<int>(nu_end - mu_end);
      g.excited_truncated = (nu_end == s.size());
      return g;
    }
    if (static_cast<std::size_t>(k) >= H.dim() || k >= 24)
      throw ConvergenceError("mass_gap: no level resolved above the ground cluster",
                             s.max_residual);
    k *= 2;
  }
}

/// Parity-resolved gap: distance between the two lowest levels of the even
/// (Pi = +1) sector. This is the pseudo-critical marker used by the
/// gap-minimum scans: inside the ordered phases the absolute gap equals the
/// quasi-degenerate doublet splitting and slides monotonically to the theta
/// boundary instead of marking the transition. Requires h = 0.
inline double parity_gap(const ChainParams& p, LanczosOptions opts = {}) {
  p.validate();
  if (p.sym_break_h != 0.0)
    throw std::invalid_argument("parity_gap: requires h = 0 (parity symmetry)");
  SparseOperator H = build_hamiltonian(p);
  opts.even_sector = true;
  opts.coupling = p.coupling;
  SpectrumResult s = lowest_eigenpairs(H, 2, std::min(opts.tol, 1e-9), opts);
  return s.eigenvalues[1] - s.eigenvalues[0];
}

}  // namespace lrising
