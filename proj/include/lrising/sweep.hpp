#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lrising/core.hpp"
#include "lrising/entanglement.hpp"
#include "lrising/observables.hpp"
#include "lrising/scaling.hpp"
#include "lrising/spectrum.hpp"
#include "lrising/version.hpp"

namespace lrising {

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int count = 1;

  std::vector<double> points() const {
    std::vector<double> p;
    if (count == 1) {
      p.push_back(min);
      return p;
    }
    for (int i = 0; i < count; ++i)
      p.push_back(min + (max - min) * static_cast<double>(i) / (count - 1));
    return p;
  }
};

inline int default_worker_count() {
  if (const char* env = std::getenv("LRISING_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return 1;
}

struct SweepConfig {
  GridSpec theta{0.0, 0.0, 1};
  std::vector<double> alphas{kAlphaInf};
  std::vector<double> temps;  // empty: ground-state sweep
  std::vector<int> sizes;     // slope sizes for phase-diagram
  int n_spins = 10;
  std::vector<CollectiveLabel> labels{kAllLabels.begin(), kAllLabels.end()};
  std::string format = "csv";  // csv | json
  std::string out;             // empty: stdout
  int workers = default_worker_count();
  std::uint64_t seed = 0x5eed1234abcdULL;
  bool resume = false;
  double pin_field = 0.0;
  double coupling = 1.0;
  // critical / scaling subcommands
  Side side = Side::AFM;
  FitForm fit_form = FitForm::Power;

  void validate() const {
    if (theta.count < 1) throw std::invalid_argument("theta grid count must be >= 1");
    constexpr double half_pi = 1.5707963267948966;
    if (theta.min < -half_pi || theta.max > half_pi || theta.min > theta.max)
      throw std::invalid_argument("theta grid must lie in [-pi/2, pi/2]");
    if (alphas.empty()) throw std::invalid_argument("alpha list must not be empty");
    for (double a : alphas)
      if (!(a >= 0.0)) throw std::invalid_argument("alpha must be >= 0 (or inf)");
    auto check_n = [](int n) {
      if (n < 2 || n % 2 != 0) throw std::invalid_argument("sizes must be even and >= 2");
      if (n > kMaxSpins) throw CapacityError("size exceeds capacity 24");
    };
    check_n(n_spins);
    for (int n : sizes) check_n(n);
    if (format != "csv" && format != "json")
      throw std::invalid_argument("format must be csv or json");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (labels.empty()) throw std::invalid_argument("label list must not be empty");
  }
};

// ---------------------------------------------------------------------------
// records and serialization
// ---------------------------------------------------------------------------

/// One evaluated sweep point. Optional fields are emitted as empty CSV
/// cells / null JSON values when absent.
struct SweepRecord {
  int n_spins = 0;
  double alpha = 0.0;
  double theta = 0.0;
  std::optional<double> temperature;
  std::array<std::optional<double>, 6> f_q;  // per label_index
  std::string best_label;
  std::optional<double> xi2;
  std::optional<double> gap;
  std::optional<int> mu, nu;
  std::optional<double> phi_z, phi_z_st;
  std::array<std::optional<double>, 6> slope;  // d log f / d log N per label
  std::optional<double> bound_eq9;
  std::string solver;  // "full" or "lanczos"
  std::uint64_t seed = 0;
  std::string xi2_axes;  // e.g. "x|z"
  std::string status = "ok";
};

namespace detail {

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string csv_sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace detail

struct RecordSchema {
  bool with_temperature = false;
  bool with_slopes = false;
  bool with_bound = false;
  std::vector<CollectiveLabel> labels{kAllLabels.begin(), kAllLabels.end()};

  std::vector<std::string> columns() const {
    std::vector<std::string> c = {"N", "alpha", "theta", "T"};
    for (auto l : kAllLabels) c.push_back("f_" + to_string(l));
    c.insert(c.end(), {"best_label", "xi2", "gap", "mu", "nu", "phi_z", "phi_z_st"});
    if (with_slopes)
      for (auto l : kAllLabels) c.push_back("slope_f_" + to_string(l));
    if (with_bound) c.push_back("bound_eq9");
    c.insert(c.end(), {"version", "solver", "seed", "xi2_axes", "status"});
    return c;
  }

  std::string csv_header() const {
    std::string h;
    for (const auto& c : columns()) {
      if (!h.empty()) h += ',';
      h += c;
    }
    return h;
  }

  std::string csv_row(const SweepRecord& r) const {
    std::vector<std::string> cells;
    auto opt = [&](const std::optional<double>& v) {
      return v ? detail::format_double(*v) : std::string{};
    };
    cells.push_back(std::to_string(r.n_spins));
    cells.push_back(detail::format_double(r.alpha));
    cells.push_back(detail::format_double(r.theta));
    cells.push_back(opt(r.temperature));
    for (auto l : kAllLabels) cells.push_back(opt(r.f_q[label_index(l)]));
    cells.push_back(r.best_label);
    cells.push_back(opt(r.xi2));
    cells.push_back(opt(r.gap));
    cells.push_back(r.mu ? std::to_string(*r.mu) : std::string{});
    cells.push_back(r.nu ? std::to_string(*r.nu) : std::string{});
    cells.push_back(opt(r.phi_z));
    cells.push_back(opt(r.phi_z_st));
    if (with_slopes)
      for (auto l : kAllLabels) cells.push_back(opt(r.slope[label_index(l)]));
    if (with_bound) cells.push_back(opt(r.bound_eq9));
    cells.push_back(kVersion);
    cells.push_back(r.solver);
    cells.push_back(std::to_string(r.seed));
    cells.push_back(r.xi2_axes);
    cells.push_back(detail::csv_sanitize(r.status));
    std::string row;
    for (const auto& c : cells) {
      if (!row.empty()) row += ',';
      row += c;
    }
    return row;
  }

  nlohmann::ordered_json json_row(const SweepRecord& r) const {
    nlohmann::ordered_json j;
    j["schema"] = kSweepSchema;
    j["N"] = r.n_spins;
    j["alpha"] = std::isinf(r.alpha) ? nlohmann::ordered_json("inf")
                                     : nlohmann::ordered_json(r.alpha);
    j["theta"] = r.theta;
    j["T"] = r.temperature ? nlohmann::ordered_json(*r.temperature)
                           : nlohmann::ordered_json(nullptr);
    for (auto l : kAllLabels) {
      const auto& v = r.f_q[label_index(l)];
      j["f_" + to_string(l)] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    }
    j["best_label"] = r.best_label;
    j["xi2"] = r.xi2 ? nlohmann::ordered_json(*r.xi2) : nlohmann::ordered_json(nullptr);
    j["gap"] = r.gap ? nlohmann::ordered_json(*r.gap) : nlohmann::ordered_json(nullptr);
    j["mu"] = r.mu ? nlohmann::ordered_json(*r.mu) : nlohmann::ordered_json(nullptr);
    j["nu"] = r.nu ? nlohmann::ordered_json(*r.nu) : nlohmann::ordered_json(nullptr);
    j["phi_z"] = r.phi_z ? nlohmann::ordered_json(*r.phi_z) : nlohmann::ordered_json(nullptr);
    j["phi_z_st"] =
        r.phi_z_st ? nlohmann::ordered_json(*r.phi_z_st) : nlohmann::ordered_json(nullptr);
    if (with_slopes)
      for (auto l : kAllLabels) {
        const auto& v = r.slope[label_index(l)];
        j["slope_f_" + to_string(l)] =
            v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
      }
    if (with_bound)
      j["bound_eq9"] =
          r.bound_eq9 ? nlohmann::ordered_json(*r.bound_eq9) : nlohmann::ordered_json(nullptr);
    j["version"] = kVersion;
    j["solver"] = r.solver;
    j["seed"] = r.seed;
    j["xi2_axes"] = r.xi2_axes;
    j["status"] = r.status;
    return j;
  }

  std::string serialize(const SweepRecord& r, const std::string& format) const {
    if (format == "csv") return csv_row(r);
    return json_row(r).dump();
  }
};

// ---------------------------------------------------------------------------
// point evaluation
// ---------------------------------------------------------------------------

/// Ground-state record: tomography, squeezing, gap, order parameters.
inline SweepRecord evaluate_ground_point(const ChainParams& p, std::uint64_t seed) {
  SweepRecord r;
  r.n_spins = p.n_spins;
  r.alpha = p.alpha;
  r.theta = p.theta;
  r.seed = seed;

  LanczosOptions opts;
  opts.seed = seed;
  opts.coupling = p.coupling;
  opts.resolve_parity = (p.sym_break_h == 0.0);

  SparseOperator H = build_hamiltonian(p);
  int k = 6;
  SpectrumResult s;
  for (;;) {
    s = lowest_eigenpairs(H, static_cast<int>(std::min<std::size_t>(k, H.dim())), opts.tol, opts);
    if (s.cluster_end(0, p.coupling) < s.size() || static_cast<std::size_t>(k) >= H.dim() ||
        k >= 24)
      break;
    k *= 2;
  }
  r.solver = H.dim() <= 512 ? "full" : "lanczos";

  const std::size_t mu_end = s.cluster_end(0, p.coupling);
  r.mu = static_cast<int>(mu_end);
  if (mu_end < s.size()) {
    r.gap = s.eigenvalues[mu_end] - s.eigenvalues[0];
    const double scale = s.cluster_scale(p.coupling);
    std::size_t nu_end = mu_end + 1;
    while (nu_end < s.size() &&
           (s.eigenvalues[nu_end] - s.eigenvalues[nu_end - 1]) < s.degeneracy_tol * scale)
      ++nu_end;
    r.nu = static_cast<int>(nu_end - mu_end);
  }

  // parity-even ground member when available
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < mu_end && i < s.size(); ++i)
    if (!s.parity.empty() && s.parity[i] == 1) {
      col = static_cast<Eigen::Index>(i);
      break;
    }
  const Eigen::VectorXd g = s.eigenvectors.col(col);
  const std::span<const double> state(g.data(), static_cast<std::size_t>(g.size()));

  const QfiTomography t = tomography(state, p.n_spins);
  for (auto l : kAllLabels) r.f_q[label_index(l)] = t.f_q[label_index(l)];
  r.best_label = to_string(t.best_label);

  const Axis perp = squeezing_perp_axis(p.theta);
  r.xi2_axes = std::string("x|") + std::string(perp == Axis::Z ? "z" : "y");
  try {
    r.xi2 = spin_squeezing(state, Axis::X, perp, p.n_spins).xi2;
  } catch (const SqueezingUndefinedError&) {
    r.xi2.reset();
  }

  const OrderParameters op = order_parameters(state, p.n_spins);
  r.phi_z = op.phi_z;
  r.phi_z_st = op.phi_z_st;
  return r;
}

/// Thermal-state records for one (alpha, theta) and a list of temperatures.
/// Shares a single full diagonalization. xi2 and order parameters are
/// thermal averages; the Eq.-(9) bound column uses the thermally grouped
/// gap and degeneracies.
inline std::vector<SweepRecord> evaluate_thermal_point(const ChainParams& p,
                                                       const std::vector<double>& temps,
                                                       std::uint64_t seed,
                                                       ThermalQfiOptions topts = {}) {
  if (p.n_spins > 14) throw CapacityError("thermal sweep requires N <= 14 (full spectrum)");
  topts.coupling = p.coupling;
  SparseOperator H = build_hamiltonian(p);
  const SpectrumResult s = full_spectrum(H, p.sym_break_h == 0.0, p.coupling);
  const std::size_t dim = s.size();

  const std::size_t mu_end = s.cluster_end(0, p.coupling, topts.t0_cluster_tol);
  double gap = 0.0;
  std::size_t nu_end = mu_end;
  if (mu_end < dim) {
    gap = s.eigenvalues[mu_end] - s.eigenvalues[0];
    nu_end = mu_end + 1;
    const double scale = s.cluster_scale(p.coupling);
    while (nu_end < dim &&
           (s.eigenvalues[nu_end] - s.eigenvalues[nu_end - 1]) < topts.t0_cluster_tol * scale)
      ++nu_end;
  }

  std::vector<ThermalQfiKernel> kernels;
  kernels.reserve(kAllLabels.size());
  for (auto l : kAllLabels) kernels.emplace_back(s, l, topts);

  std::vector<SweepRecord> out;
  for (double T : temps) {
    SweepRecord r;
    r.n_spins = p.n_spins;
    r.alpha = p.alpha;
    r.theta = p.theta;
    r.temperature = T;
    r.seed = seed;
    r.solver = "full";
    r.mu = static_cast<int>(mu_end);
    r.nu = static_cast<int>(nu_end - mu_end);
    r.gap = gap;
    if (gap > 0.0 && T > 0.0)
      r.bound_eq9 = thermal_lower_bound(gap, T, *r.mu, *r.nu);
    else if (gap > 0.0)
      r.bound_eq9 = 1.0;

    double best = -1.0;
    for (auto l : kAllLabels) {
      const double f = kernels[label_index(l)].density(T);
      r.f_q[label_index(l)] = f;
      if (f > best) {
        best = f;
        r.best_label = to_string(l);
      }
    }

    // thermal averages: Tr[rho A] = sum_k p_k <k|A|k>
    std::vector<double> pks(dim, 0.0);
    if (T <= 0.0) {
      for (std::size_t i = 0; i < mu_end; ++i) pks[i] = 1.0 / static_cast<double>(mu_end);
    } else {
      double z = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        pks[i] = std::exp(-(s.eigenvalues[i] - s.eigenvalues[0]) / T);
        z += pks[i];
      }
      for (auto& v : pks) v /= z;
    }
    const auto thermal_mean_var = [&](CollectiveLabel l, double& mean, double& var) {
      SparseOperator op = build_collective(l, p.n_spins);
      std::vector<double> y(dim);
      double m1 = 0.0, m2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        if (pks[k] < topts.weight_cutoff) continue;
        const auto vk = s.eigenvectors.col(static_cast<Eigen::Index>(k));
        op.apply(std::span<const double>(vk.data(), dim), y);
        double mk = 0.0, nk = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
          mk += vk[static_cast<Eigen::Index>(i)] * y[i];
          nk += y[i] * y[i];
        }
        if (op.imaginary_factor() == ImaginaryFactor::I) mk = 0.0;
        m1 += pks[k] * mk;
        m2 += pks[k] * nk;
      }
      mean = m1;
      var = m2 - m1 * m1;
    };
    double mean_x = 0.0, var_x = 0.0, mean_perp = 0.0, var_perp = 0.0;
    const Axis perp = squeezing_perp_axis(p.theta);
    thermal_mean_var({Axis::X, false}, mean_x, var_x);
    thermal_mean_var({perp, false}, mean_perp, var_perp);
    r.xi2_axes = std::string("x|") + std::string(perp == Axis::Z ? "z" : "y");
    if (std::abs(mean_x) >= 1e-8 * p.n_spins)
      r.xi2 = p.n_spins * var_perp / (mean_x * mean_x);

    double mz = 0.0, vz = 0.0, mzst = 0.0, vzst = 0.0;
    thermal_mean_var({Axis::Z, false}, mz, vz);
    thermal_mean_var({Axis::Z, true}, mzst, vzst);
    r.phi_z = mz;
    r.phi_z_st = mzst;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// sweep engines with deterministic output order and resume support
// ---------------------------------------------------------------------------

namespace detail {

class RecordWriter {
 public:
  RecordWriter(const std::string& path, const RecordSchema& schema, const std::string& format,
               bool resume)
      : schema_(schema), format_(format) {
    const std::string header = format == "csv" ? schema.csv_header() : std::string{};
    if (path.empty()) {
      out_ = &std::cout;
      if (!header.empty()) *out_ << header << '\n';
      return;
    }
    if (resume) {
      std::ifstream in(path);
      if (in) {
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          if (format == "csv" && first) {
            if (line != header)
              throw std::invalid_argument("resume: existing header does not match schema");
            first = false;
            continue;
          }
          first = false;
          ++existing_;
        }
      }
    }
    const bool fresh = !resume || existing_ == 0;
    file_.open(path, fresh ? std::ios::trunc : std::ios::app);
    if (!file_) throw std::runtime_error("cannot open output file: " + path);
    out_ = &file_;
    if (fresh) {
      existing_ = 0;
      if (!header.empty()) *out_ << header << '\n';
    }
  }

  std::size_t already_written() const { return existing_; }

  void write(const SweepRecord& r) {
    *out_ << schema_.serialize(r, format_) << '\n';
    out_->flush();
  }

 private:
  RecordSchema schema_;
  std::string format_;
  std::ofstream file_;
  std::ostream* out_ = nullptr;
  std::size_t existing_ = 0;
};

}  // namespace detail

/// Phase-diagram sweep over the (theta, alpha) grid. One row per grid
/// point, theta-major order, independent of the worker count. When the
/// config lists >= 2 sizes, per-point d log f_Q / d log N columns are
/// appended (evaluated from the size list; the row itself uses the largest
/// size). Per-point failures are recorded inline and the sweep continues.
inline std::vector<SweepRecord> run_phase_diagram(const SweepConfig& cfg,
                                                  detail::RecordWriter* writer = nullptr) {
  cfg.validate();
  std::vector<int> sizes = cfg.sizes;
  if (sizes.empty()) sizes = {cfg.n_spins};
  std::sort(sizes.begin(), sizes.end());
  const int n_max = sizes.back();
  const bool slopes = sizes.size() >= 2;

  const std::vector<double> thetas = cfg.theta.points();
  const std::size_t total = thetas.size() * cfg.alphas.size();
  const std::size_t skip = writer ? writer->already_written() : 0;
  std::vector<SweepRecord> records(total);

  detail::parallel_for(total, cfg.workers, [&](std::size_t idx) {
    if (idx < skip) return;
    const double theta = thetas[idx / cfg.alphas.size()];
    const double alpha = cfg.alphas[idx % cfg.alphas.size()];
    SweepRecord& r = records[idx];
    try {
      ChainParams p;
      p.n_spins = n_max;
      p.alpha = alpha;
      p.theta = theta;
      p.coupling = cfg.coupling;
      p.sym_break_h = cfg.pin_field;
      r = evaluate_ground_point(p, cfg.seed);
      if (slopes) {
        std::vector<double> ln;
        std::array<std::vector<double>, 6> lf;
        for (int n : sizes) {
          ChainParams q = p;
          q.n_spins = n;
          SweepRecord rr = n == n_max ? r : evaluate_ground_point(q, cfg.seed);
          ln.push_back(std::log(n));
          for (auto l : kAllLabels) lf[label_index(l)].push_back(*rr.f_q[label_index(l)]);
        }
        for (auto l : kAllLabels) {
          auto& v = lf[label_index(l)];
          bool ok = true;
          for (double& x : v) {
            if (x < 1e-12) {
              ok = false;
              break;
            }
            x = std::log(x);
          }
          if (ok) r.slope[label_index(l)] = detail::linear_least_squares(ln, v).slope;
        }
      }
    } catch (const std::exception& e) {
      r = SweepRecord{};
      r.n_spins = n_max;
      r.alpha = alpha;
      r.theta = theta;
      r.seed = cfg.seed;
      r.status = std::string("error: ") + e.what();
    }
  });

  if (writer)
    for (std::size_t i = skip; i < total; ++i) writer->write(records[i]);
  return records;
}

/// Thermal sweep: alpha-major, then theta, then T. One full
/// diagonalization per (alpha, theta), shared across temperatures.
inline std::vector<SweepRecord> run_thermal(const SweepConfig& cfg,
                                            detail::RecordWriter* writer = nullptr) {
  cfg.validate();
  if (cfg.temps.empty()) throw std::invalid_argument("thermal sweep: temperature list is empty");
  if (cfg.n_spins > 14) throw CapacityError("thermal sweep requires N <= 14");
  const std::vector<double> thetas = cfg.theta.points();
  const std::size_t tasks = cfg.alphas.size() * thetas.size();
  const std::size_t per_task = cfg.temps.size();
  const std::size_t skip = writer ? writer->already_written() : 0;
  std::vector<std::vector<SweepRecord>> chunks(tasks);

  detail::parallel_for(tasks, cfg.workers, [&](std::size_t idx) {
    if ((idx + 1) * per_task <= skip) return;  // fully resumed chunk
    const double alpha = cfg.alphas[idx / thetas.size()];
    const double theta = thetas[idx % thetas.size()];
    ChainParams p;
    p.n_spins = cfg.n_spins;
    p.alpha = alpha;
    p.theta = theta;
    p.coupling = cfg.coupling;
    p.sym_break_h = cfg.pin_field;
    try {
      chunks[idx] = evaluate_thermal_point(p, cfg.temps, cfg.seed);
    } catch (const std::exception& e) {
      chunks[idx].clear();
      for (double T : cfg.temps) {
        SweepRecord r;
        r.n_spins = cfg.n_spins;
        r.alpha = alpha;
        r.theta = theta;
        r.temperature = T;
        r.seed = cfg.seed;
        r.status = std::string("error: ") + e.what();
        chunks[idx].push_back(std::move(r));
      }
    }
  });

  std::vector<SweepRecord> records(tasks * per_task);
  for (std::size_t idx = 0; idx < tasks; ++idx)
    for (std::size_t j = 0; j < chunks[idx].size(); ++j)
      records[idx * per_task + j] = std::move(chunks[idx][j]);
  if (writer)
    for (std::size_t i = skip; i < records.size(); ++i) writer->write(records[i]);
  return records;
}

}  // namespace lrising
