#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "lrising/core.hpp"
#include "lrising/entanglement.hpp"
#include "lrising/observables.hpp"
#include "lrising/spectrum.hpp"

namespace lrising {

namespace detail {

/// Index-addressed parallel map; results are independent of the worker count.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct LinearFit {
  double slope = 0.0, intercept = 0.0, slope_stderr = 0.0, rms = 0.0;
};

inline LinearFit linear_least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    sse += r * r;
  }
  f.rms = std::sqrt(sse / n);
  f.slope_stderr = n > 2 ? std::sqrt(sse / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
  return f;
}

}  // namespace detail

enum class Side { FM, AFM };

inline std::string_view to_string(Side s) { return s == Side::FM ? "fm" : "afm"; }

// ---------------------------------------------------------------------------
// power-law fitting
// ---------------------------------------------------------------------------

enum class FitForm { Power, Log, ShiftedPower, Saturating };

inline std::string_view to_string(FitForm f) {
  switch (f) {
    case FitForm::Power: return "power";
    case FitForm::Log: return "log";
    case FitForm::ShiftedPower: return "shifted";
    default: return "saturating";
  }
}

/// Result of a least-squares fit in the form's transformed space.
///   Power:        v = a N^b
///   Log:          v = 1 + a log N
///   ShiftedPower: v = 1 + a N^b
///   Saturating:   v = a - b2 / N^c   (prefactor=a, exponent=c, shift=b2)
struct ScalingFit {
  FitForm form = FitForm::Power;
  double prefactor = 0.0;
  double exponent = 0.0;
  double shift = 0.0;            // Saturating only
  double residual = 0.0;         // RMS in the transformed space
  double residual_linear = 0.0;  // RMS of (model - value) in linear space
  double exponent_stderr = 0.0;
  std::vector<double> sizes;

  double evaluate(double n) const {
    switch (form) {
      case FitForm::Power: return prefactor * std::pow(n, exponent);
      case FitForm::Log: return 1.0 + prefactor * std::log(n);
      case FitForm::ShiftedPower: return 1.0 + prefactor * std::pow(n, exponent);
      default: return prefactor - shift / std::pow(n, exponent);
    }
  }
};

inline ScalingFit fit_power_law(const std::vector<double>& sizes, const std::vector<double>& values,
                                FitForm form) {
  if (sizes.size() != values.size() || sizes.size() < 2)
    throw std::invalid_argument("fit_power_law: need matching sizes/values, >= 2 points");
  ScalingFit fit;
  fit.form = form;
  fit.sizes = sizes;
  const std::size_t n = sizes.size();
  std::vector<double> lx(n);
  for (std::size_t i = 0; i < n; ++i) lx[i] = std::log(sizes[i]);

  if (form == FitForm::Power || form == FitForm::ShiftedPower) {
    const double off = form == FitForm::ShiftedPower ? 1.0 : 0.0;
    std::vector<double> ly(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = values[i] - off;
      if (!(v > 0.0))
        throw std::domain_error("fit_power_law: nonpositive value in a log-transformed fit");
      ly[i] = std::log(v);
    }
    const auto lf = detail::linear_least_squares(lx, ly);
    fit.prefactor = std::exp(lf.intercept);
    fit.exponent = lf.slope;
    fit.residual = lf.rms;
    fit.exponent_stderr = lf.slope_stderr;
  } else if (form == FitForm::Log) {
    // single parameter, intercept pinned at 1
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += (values[i] - 1.0) * lx[i];
      den += lx[i] * lx[i];
    }
    fit.prefactor = num / den;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = values[i] - (1.0 + fit.prefactor * lx[i]);
      sse += r * r;
    }
    fit.residual = std::sqrt(sse / n);
  } else {  // Saturating: v = a - b / N^c, scan + refine on c
    const auto sse_at = [&](double c, double* a_out, double* b_out) {
      // linear LS in (a, b) for fixed c with basis {1, -N^-c}
      double s11 = static_cast<double>(n), s12 = 0.0, s22 = 0.0, sy1 = 0.0, sy2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double u = -std::pow(sizes[i], -c);
        s12 += u;
        s22 += u * u;
        sy1 += values[i];
        sy2 += u * values[i];
      }
      const double det = s11 * s22 - s12 * s12;
      const double a = (s22 * sy1 - s12 * sy2) / det;
      const double b = (s11 * sy2 - s12 * sy1) / det;
      double sse = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = values[i] - (a - b * std::pow(sizes[i], -c));
        sse += r * r;
      }
      if (a_out) *a_out = a;
      if (b_out) *b_out = b;
      return sse;
    };
    double best_c = 0.05, best_sse = std::numeric_limits<double>::infinity();
    for (double c = 0.05; c <= 4.0 + 1e-12; c += 0.005) {
      const double s = sse_at(c, nullptr, nullptr);
      if (s < best_sse) {
        best_sse = s;
        best_c = c;
      }
    }
    double lo = std::max(0.01, best_c - 0.005), hi = std::min(4.5, best_c + 0.005);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
    double f1 = sse_at(c1, nullptr, nullptr), f2 = sse_at(c2, nullptr, nullptr);
    while (hi - lo > 1e-10) {
      if (f1 < f2) {
        hi = c2;
        c2 = c1;
        f2 = f1;
        c1 = hi - gr * (hi - lo);
        f1 = sse_at(c1, nullptr, nullptr);
      } else {
        lo = c1;
        c1 = c2;
        f1 = f2;
        c2 = lo + gr * (hi - lo);
        f2 = sse_at(c2, nullptr, nullptr);
      }
    }
    fit.exponent = 0.5 * (lo + hi);
    double a = 0.0, b = 0.0;
    const double sse = sse_at(fit.exponent, &a, &b);
    fit.prefactor = a;
    fit.shift = b;
    fit.residual = std::sqrt(sse / n);
  }

  double sse_lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = fit.evaluate(sizes[i]) - values[i];
    sse_lin += r * r;
  }
  fit.residual_linear = std::sqrt(sse_lin / n);
  return fit;
}

// ---------------------------------------------------------------------------
// critical-point location
// ---------------------------------------------------------------------------

struct GapScanOptions {
  double coarse_step = 0.02;   // rad
  double refine_tol = 1e-4;    // rad
  double theta_lo = std::numeric_limits<double>::quiet_NaN();  // window override
  double theta_hi = std::numeric_limits<double>::quiet_NaN();
  int workers = 2;
  LanczosOptions solver{};
};

struct GapMinimum {
  double theta = 0.0;
  double gap = 0.0;
  bool boundary = false;  // no interior minimum in the scanned window
};

/// Finite-size pseudo-critical angle: minimum over theta of the
/// parity-resolved gap. Coarse scan (0.02 rad) plus golden-section
/// refinement to 1e-4 rad.
inline GapMinimum locate_gap_minimum(double alpha, int n_spins, Side side,
                                     GapScanOptions opts = {}) {
  constexpr double half_pi = 1.5707963267948966;
  double lo = side == Side::FM ? -half_pi + 1e-3 : 0.02;
  double hi = side == Side::FM ? -0.02 : half_pi - 1e-4;
  if (!std::isnan(opts.theta_lo)) lo = opts.theta_lo;
  if (!std::isnan(opts.theta_hi)) hi = opts.theta_hi;
  if (!(lo < hi)) throw std::invalid_argument("locate_gap_minimum: empty window");

  const auto gap_at = [&](double theta) {
    ChainParams p;
    p.n_spins = n_spins;
    p.alpha = alpha;
    p.theta = theta;
    return parity_gap(p, opts.solver);
  };

  const int count = std::max(2, static_cast<int>(std::floor((hi - lo) / opts.coarse_step)) + 1);
  std::vector<double> thetas(count), gaps(count);
  for (int i = 0; i < count; ++i)
    thetas[i] = i == count - 1 ? hi : lo + opts.coarse_step * i;
  detail::parallel_for(static_cast<std::size_t>(count), opts.workers,
                       [&](std::size_t i) { gaps[i] = gap_at(thetas[i]); });

  int imin = 0;
  for (int i = 1; i < count; ++i)
    if (gaps[i] < gaps[imin]) imin = i;
  if (imin == 0 || imin == count - 1)
    return {thetas[imin], gaps[imin], true};

  double a = thetas[imin - 1], b = thetas[imin + 1];
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = gap_at(c1), f2 = gap_at(c2);
  while (b - a > opts.refine_tol) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = gap_at(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = gap_at(c2);
    }
  }
  const double tm = 0.5 * (a + b);
  return {tm, gap_at(tm), false};
}

/// Per-size minima with window hints: sizes are scanned in ascending order
/// and, from the third size on, the coarse window narrows to +-0.12 rad
/// around the previous minimum (interior minima only).
inline std::vector<std::pair<int, GapMinimum>> per_size_minima(double alpha, Side side,
                                                               std::vector<int> sizes,
                                                               GapScanOptions opts = {},
                                                               bool window_hints = true) {
  std::sort(sizes.begin(), sizes.end());
  std::vector<std::pair<int, GapMinimum>> out;
  std::optional<double> hint;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    GapScanOptions o = opts;
    if (window_hints && hint && i >= 2) {
      o.theta_lo = *hint - 0.12;
      o.theta_hi = *hint + 0.12;
      constexpr double half_pi = 1.5707963267948966;
      const double wlo = side == Side::FM ? -half_pi + 1e-3 : 0.02;
      const double whi = side == Side::FM ? -0.02 : half_pi - 1e-4;
      o.theta_lo = std::max(o.theta_lo, wlo);
      o.theta_hi = std::min(o.theta_hi, whi);
    }
    GapMinimum m = locate_gap_minimum(alpha, sizes[i], side, o);
    if (m.boundary && window_hints && hint && i >= 2) {
      // hint window missed: fall back to the full side interval
      m = locate_gap_minimum(alpha, sizes[i], side, opts);
    }
    if (!m.boundary) hint = m.theta;
    out.push_back({sizes[i], m});
  }
  return out;
}

struct CriticalPointEstimate {
  double theta_inf = 0.0;
  double uncertainty = 0.0;
  double omega = 1.0;  // fitted finite-size exponent
  Side side = Side::AFM;
  std::vector<std::pair<int, GapMinimum>> per_size;
};

/// Fit theta_N = theta_inf + c N^(-omega) by scanning omega (least squares
/// in (theta_inf, c) for each omega, golden refinement on the best).
inline CriticalPointEstimate extrapolate_critical(double alpha, const std::vector<int>& sizes,
                                                  Side side, GapScanOptions opts = {},
                                                  std::vector<std::pair<int, GapMinimum>> minima = {}) {
  if (sizes.size() < 4) throw std::invalid_argument("extrapolate_critical: >= 4 sizes required");
  if (minima.empty()) minima = per_size_minima(alpha, side, sizes, opts);

  const std::size_t n = minima.size();
  std::vector<double> ns(n), th(n);
  for (std::size_t i = 0; i < n; ++i) {
    ns[i] = minima[i].first;
    th[i] = minima[i].second.theta;
  }

  struct Sol {
    double sse, t_inf, c;
  };
  const auto solve_at = [&](double w) -> Sol {
    double s11 = static_cast<double>(n), s12 = 0.0, s22 = 0.0, sy1 = 0.0, sy2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = std::pow(ns[i], -w);
      s12 += u;
      s22 += u * u;
      sy1 += th[i];
      sy2 += u * th[i];
    }
    const double det = s11 * s22 - s12 * s12;
    const double t0 = (s22 * sy1 - s12 * sy2) / det;
    const double c = (s11 * sy2 - s12 * sy1) / det;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = th[i] - (t0 + c * std::pow(ns[i], -w));
      sse += r * r;
    }
    return {sse, t0, c};
  };

  double best_w = 1.0, best_sse = std::numeric_limits<double>::infinity();
  for (double w = 0.2; w <= 3.0 + 1e-12; w += 0.01) {
    const double s = solve_at(w).sse;
    if (s < best_sse) {
      best_sse = s;
      best_w = w;
    }
  }
  double lo = std::max(0.05, best_w - 0.01), hi = std::min(3.5, best_w + 0.01);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
  double f1 = solve_at(c1).sse, f2 = solve_at(c2).sse;
  while (hi - lo > 1e-9) {
    if (f1 < f2) {
      hi = c2;
      c2 = c1;
      f2 = f1;
      c1 = hi - gr * (hi - lo);
      f1 = solve_at(c1).sse;
    } else {
      lo = c1;
      c1 = c2;
      f1 = f2;
      c2 = lo + gr * (hi - lo);
      f2 = solve_at(c2).sse;
    }
  }

  CriticalPointEstimate est;
  est.side = side;
  est.omega = 0.5 * (lo + hi);
  const Sol s = solve_at(est.omega);
  est.theta_inf = s.t_inf;
  est.per_size = std::move(minima);
  // half-width from the linear-fit covariance at fixed omega, floored by the
  // refinement resolution
  double s12 = 0.0, s22 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = std::pow(ns[i], -est.omega);
    s12 += u;
    s22 += u * u;
  }
  const double det = static_cast<double>(n) * s22 - s12 * s12;
  const double var_t0 =
      n > 3 ? s.sse / (static_cast<double>(n) - 3.0) * (s22 / det) : s.sse * (s22 / det);
  est.uncertainty = std::max(std::sqrt(std::max(var_t0, 0.0)), opts.refine_tol);
  return est;
}

inline const CollectiveLabel kOrderParameterLabel[2] = {{Axis::Z, false}, {Axis::Z, true}};

/// Lowest parity-even member of the ground cluster (falls back to the
/// ground state when no even member was resolved). Three pairs are
/// computed so a quasi-degenerate ground doublet sits strictly inside the
/// window and gets parity-rotated.
inline Eigen::VectorXd even_ground_state(const ChainParams& p, LanczosOptions opts = {}) {
  SpectrumResult s = ground_spectrum(p, 3, opts);
  const std::size_t cl = s.cluster_end(0, p.coupling);
  for (std::size_t i = 0; i < cl && i < s.size(); ++i)
    if (s.parity[i] == 1) return s.eigenvectors.col(static_cast<Eigen::Index>(i));
  return s.eigenvectors.col(0);
}

inline double qfi_at(double alpha, double theta, int n_spins, CollectiveLabel label,
                     LanczosOptions opts = {}) {
  ChainParams p;
  p.n_spins = n_spins;
  p.alpha = alpha;
  p.theta = theta;
  const Eigen::VectorXd g = even_ground_state(p, opts);
  return qfi_pure(std::span<const double>(g.data(), static_cast<std::size_t>(g.size())), label,
                  n_spins);
}

/// Finite-size scaling exponent of the QFI density along the critical line:
/// fit of f_Q(N) at the per-size gap minima. The uncertainty combines the
/// fit standard error with the sensitivity to the critical-point location
/// (refits at theta_N +- 0.01 rad).
struct CriticalExponent {
  double beta = 0.0;
  double uncertainty = 0.0;
  ScalingFit fit;
  std::vector<std::pair<int, GapMinimum>> per_size;
};

inline CriticalExponent scaling_exponent_at_criticality(
    double alpha, Side side, const std::vector<int>& sizes, CollectiveLabel label,
    FitForm form = FitForm::Power, GapScanOptions opts = {},
    std::vector<std::pair<int, GapMinimum>> minima = {}) {
  if (minima.empty()) minima = per_size_minima(alpha, side, sizes, opts);
  std::vector<double> ns, f0, fm, fp;
  ns.reserve(minima.size());
  for (const auto& [n, m] : minima) {
    ns.push_back(n);
    f0.push_back(qfi_at(alpha, m.theta, n, label, opts.solver));
    fm.push_back(qfi_at(alpha, m.theta - 0.01, n, label, opts.solver));
    fp.push_back(qfi_at(alpha, std::min(m.theta + 0.01, 1.5707), n, label, opts.solver));
  }
  CriticalExponent ce;
  ce.fit = fit_power_law(ns, f0, form);
  ce.beta = ce.fit.exponent;
  const double bm = fit_power_law(ns, fm, form).exponent;
  const double bp = fit_power_law(ns, fp, form).exponent;
  ce.uncertainty = std::hypot(ce.fit.exponent_stderr,
                              std::max(std::abs(bm - ce.beta), std::abs(bp - ce.beta)));
  ce.per_size = std::move(minima);
  return ce;
}

/// Mean-field exponent (alpha-1)/2, quoted accuracy window 1 < alpha < 5/3;
/// beyond alpha ~ 3 the short-range value 3/4 supersedes it.
struct MeanFieldExponent {
  double value = 0.0;
  bool boundary = false;  // alpha == 1 limit value
};

inline MeanFieldExponent mean_field_exponent(double alpha) {
  if (alpha < 1.0) throw std::domain_error("mean_field_exponent: requires alpha >= 1");
  if (alpha == 1.0) return {0.0, true};
  return {(alpha - 1.0) / 2.0, false};
}

struct DerivativeResult {
  double value = 0.0;
  bool one_sided = false;
};

/// d f_Q / d theta by central finite difference (delta = 1e-3 rad),
/// one-sided at the theta boundaries.
inline DerivativeResult qfi_theta_derivative(double alpha, double theta, int n_spins,
                                             CollectiveLabel label, double delta = 1e-3,
                                             LanczosOptions opts = {}) {
  constexpr double half_pi = 1.5707963267948966;
  const bool lo_ok = theta - delta >= -half_pi;
  const bool hi_ok = theta + delta <= half_pi;
  if (lo_ok && hi_ok) {
    const double fp = qfi_at(alpha, theta + delta, n_spins, label, opts);
    const double fmv = qfi_at(alpha, theta - delta, n_spins, label, opts);
    return {(fp - fmv) / (2.0 * delta), false};
  }
  const double sgn = hi_ok ? 1.0 : -1.0;
  const double f0 = qfi_at(alpha, theta, n_spins, label, opts);
  const double f1 = qfi_at(alpha, theta + sgn * delta, n_spins, label, opts);
  return {sgn * (f1 - f0) / delta, true};
}

/// d f_Q / d alpha by central finite difference (delta = 0.05), one-sided
/// near alpha = 0.
inline DerivativeResult qfi_alpha_derivative(double theta, double alpha, int n_spins,
                                             CollectiveLabel label, double delta = 0.05,
                                             LanczosOptions opts = {}) {
  if (alpha - delta >= 0.0) {
    const double fp = qfi_at(alpha + delta, theta, n_spins, label, opts);
    const double fmv = qfi_at(alpha - delta, theta, n_spins, label, opts);
    return {(fp - fmv) / (2.0 * delta), false};
  }
  const double f0 = qfi_at(alpha, theta, n_spins, label, opts);
  const double f1 = qfi_at(alpha + delta, theta, n_spins, label, opts);
  return {(f1 - f0) / delta, true};
}

enum class CorrelationScanMode { SizeScan, DistanceScan };

/// Power-law fits of the mid-chain longitudinal correlator along the
/// critical line. SizeScan: |<sig_z^(N/2) sig_z^(N/2 + round(N/5))>| vs N
/// (the QFI-comparable exponent is fit.exponent + 1). DistanceScan:
/// |<sig_z^(N/2) sig_z^(N/2+r)>| vs r at the largest size. Staggered signs
/// are removed by the absolute value.
inline ScalingFit correlation_scaling(double alpha, Side side, const std::vector<int>& sizes,
                                      CorrelationScanMode mode, GapScanOptions opts = {},
                                      std::vector<std::pair<int, GapMinimum>> minima = {}) {
  if (minima.empty()) minima = per_size_minima(alpha, side, sizes, opts);
  std::vector<double> xs, vs;
  if (mode == CorrelationScanMode::SizeScan) {
    for (const auto& [n, m] : minima) {
      if (n / 5 < 1 && n < 5) continue;
      ChainParams p;
      p.n_spins = n;
      p.alpha = alpha;
      p.theta = m.theta;
      const Eigen::VectorXd g = even_ground_state(p, opts.solver);
      const int r = std::max(1, static_cast<int>(std::lround(n / 5.0)));
      const int i0 = n / 2 - 1;  // site N/2, 0-based
      const double v = sz_pair_expectation(
          std::span<const double>(g.data(), static_cast<std::size_t>(g.size())), i0, i0 + r);
      xs.push_back(n);
      vs.push_back(std::abs(v));
    }
  } else {
    const auto& [n, m] = minima.back();
    ChainParams p;
    p.n_spins = n;
    p.alpha = alpha;
    p.theta = m.theta;
    const Eigen::VectorXd g = even_ground_state(p, opts.solver);
    const int i0 = n / 2 - 1;
    for (int r = 1; r <= n / 2; ++r) {
      const double v = sz_pair_expectation(
          std::span<const double>(g.data(), static_cast<std::size_t>(g.size())), i0, i0 + r);
      xs.push_back(r);
      vs.push_back(std::abs(v));
    }
  }
  for (double v : vs)
    if (v < 1e-10)
      throw std::domain_error("correlation_scaling: degenerate (vanishing) correlation data");
  return fit_power_law(xs, vs, FitForm::Power);
}

}  // namespace lrising
