// lrising: exact-diagonalization sweeps for the variable-range Ising chain.
// Subcommands: point, phase-diagram, thermal, critical, scaling, oracle.
// Exit codes: 0 success, 2 config error, 3 solver error, 4 capacity error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lrising/core.hpp"
#include "lrising/entanglement.hpp"
#include "lrising/perturbative.hpp"
#include "lrising/scaling.hpp"
#include "lrising/spectrum.hpp"
#include "lrising/sweep.hpp"
#include "lrising/variational.hpp"
#include "lrising/version.hpp"

namespace {

using nlohmann::ordered_json;

double parse_alpha_token(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF") return lrising::kAlphaInf;
  return std::stod(s);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

// "v" or "v1,v2,.." or "min:max:count"
std::vector<double> parse_value_list(const std::string& s) {
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw std::invalid_argument("grid spec must be min:max:count");
    const double lo = parse_alpha_token(parts[0]);
    const double hi = parse_alpha_token(parts[1]);
    const int count = std::stoi(parts[2]);
    if (count < 1) throw std::invalid_argument("grid count must be >= 1");
    lrising::GridSpec g{lo, hi, count};
    return g.points();
  }
  std::vector<double> out;
  for (const auto& t : split(s, ',')) out.push_back(parse_alpha_token(t));
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

lrising::GridSpec parse_grid(const std::string& s) {
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw std::invalid_argument("grid spec must be min:max:count");
    return {std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2])};
  }
  const double v = std::stod(s);
  return {v, v, 1};
}

std::vector<int> parse_sizes(const std::string& s) {
  std::vector<int> out;
  for (const auto& t : split(s, ',')) out.push_back(std::stoi(t));
  return out;
}

std::vector<lrising::CollectiveLabel> parse_labels(const std::string& s) {
  std::vector<lrising::CollectiveLabel> out;
  for (const auto& t : split(s, ',')) out.push_back(lrising::parse_label(t));
  return out;
}

lrising::FitForm parse_fit_form(const std::string& s) {
  if (s == "power") return lrising::FitForm::Power;
  if (s == "log") return lrising::FitForm::Log;
  if (s == "shifted") return lrising::FitForm::ShiftedPower;
  if (s == "saturating") return lrising::FitForm::Saturating;
  throw std::invalid_argument("fit form must be power|log|shifted|saturating");
}

/// Flat key-value config file; every CLI flag overrides its entry.
struct RawOptions {
  std::optional<std::string> theta, alpha, temp, sizes, labels, format, out, side, fit_form,
      observable, kind;
  std::optional<int> n, workers, order;
  std::optional<std::uint64_t> seed;
  std::optional<double> pin_field, coupling, sigma2;
  std::optional<bool> resume;

  void load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    ordered_json j = ordered_json::parse(in);
    auto gets = [&](const char* key, std::optional<std::string>& slot) {
      if (j.contains(key) && !slot) {
        if (j[key].is_string())
          slot = j[key].get<std::string>();
        else
          slot = j[key].dump();
      }
    };
    gets("theta", theta);
    gets("alpha", alpha);
    gets("temp", temp);
    gets("sizes", sizes);
    gets("labels", labels);
    gets("format", format);
    gets("out", out);
    gets("side", side);
    gets("fit_form", fit_form);
    gets("observable", observable);
    if (j.contains("n") && !n) n = j["n"].get<int>();
    if (j.contains("workers") && !workers) workers = j["workers"].get<int>();
    if (j.contains("seed") && !seed) seed = j["seed"].get<std::uint64_t>();
    if (j.contains("pin_field") && !pin_field) pin_field = j["pin_field"].get<double>();
    if (j.contains("coupling") && !coupling) coupling = j["coupling"].get<double>();
    if (j.contains("resume") && !resume) resume = j["resume"].get<bool>();
  }
};

void emit(const ordered_json& j, const std::string& format, const std::string& out_path) {
  std::ostream* os = &std::cout;
  std::ofstream f;
  if (!out_path.empty()) {
    f.open(out_path);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    os = &f;
  }
  if (format == "csv") {
    for (auto it = j.begin(); it != j.end(); ++it)
      *os << it.key() << ',' << (it.value().is_string() ? it.value().get<std::string>()
                                                        : it.value().dump())
          << '\n';
  } else {
    *os << j.dump(2) << '\n';
  }
}

ordered_json fit_to_json(const lrising::ScalingFit& fit) {
  ordered_json j;
  j["form"] = std::string(lrising::to_string(fit.form));
  j["prefactor"] = fit.prefactor;
  j["exponent"] = fit.exponent;
  if (fit.form == lrising::FitForm::Saturating) j["shift"] = fit.shift;
  j["residual"] = fit.residual;
  j["residual_linear"] = fit.residual_linear;
  j["exponent_stderr"] = fit.exponent_stderr;
  j["sizes"] = fit.sizes;
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{"variable-range Ising chain: QFI tomography and scaling toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lrising::kVersion);

  RawOptions raw;
  std::string config_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat JSON config file (flags override)");
    cmd->add_option("--n", raw.n, "number of spins (even, <= 24)");
    cmd->add_option("--alpha", raw.alpha, "decay power: value, list, or grid; 'inf' allowed");
    cmd->add_option("--theta", raw.theta, "control angle: value or min:max:count grid");
    cmd->add_option("--temp", raw.temp, "temperature list or grid (energy units)");
    cmd->add_option("--labels", raw.labels, "collective labels, e.g. y,z,z_st (default all)");
    cmd->add_option("--sizes", raw.sizes, "comma list of system sizes");
    cmd->add_option("--format", raw.format, "csv|json (default csv)");
    cmd->add_option("--out", raw.out, "output path (default stdout)");
    cmd->add_option("--workers", raw.workers, "worker threads (default $LRISING_WORKERS or 1)");
    cmd->add_option("--seed", raw.seed, "solver start-vector seed");
    cmd->add_flag("--resume", [&raw](std::int64_t) { raw.resume = true; },
                  "resume an interrupted sweep from its output file");
    cmd->add_option("--pin-field", raw.pin_field, "symmetry-breaking field h on site N");
    cmd->add_option("--coupling", raw.coupling, "energy scale J (default 1)");
  };

  CLI::App* point = app.add_subcommand("point", "single-point evaluation");
  add_common(point);
  CLI::App* phase = app.add_subcommand("phase-diagram", "theta-alpha grid sweep");
  add_common(phase);
  CLI::App* thermal = app.add_subcommand("thermal", "theta-T sweep per alpha (full spectrum)");
  add_common(thermal);
  CLI::App* critical = app.add_subcommand("critical", "critical-point location and exponent");
  add_common(critical);
  critical->add_option("--side", raw.side, "fm|afm");
  critical->add_option("--fit-form", raw.fit_form, "power|log|shifted|saturating");
  CLI::App* scaling = app.add_subcommand("scaling", "finite-size fits of QFI or correlators");
  add_common(scaling);
  scaling->add_option("--side", raw.side, "fm|afm (correlation scans)");
  scaling->add_option("--fit-form", raw.fit_form, "power|log|shifted|saturating");
  scaling->add_option("--observable", raw.observable, "qfi|corr-size|corr-dist (default qfi)");
  CLI::App* oracle = app.add_subcommand("oracle", "closed-form predictions");
  add_common(oracle);
  std::string oracle_kind;
  oracle->add_option("kind", oracle_kind, "perturbative|variational")->required();
  oracle->add_option("--order", raw.order, "FM critical line order (1 or 2)");

  CLI11_PARSE(app, argc, argv);
  if (!config_path.empty()) raw.load_config(config_path);

  lrising::SweepConfig cfg;
  if (raw.theta) cfg.theta = parse_grid(*raw.theta);
  if (raw.alpha) cfg.alphas = parse_value_list(*raw.alpha);
  if (raw.temp) cfg.temps = parse_value_list(*raw.temp);
  if (raw.sizes) cfg.sizes = parse_sizes(*raw.sizes);
  if (raw.labels) cfg.labels = parse_labels(*raw.labels);
  if (raw.format) cfg.format = *raw.format;
  if (raw.out) cfg.out = *raw.out;
  if (raw.workers) cfg.workers = *raw.workers;
  if (raw.seed) cfg.seed = *raw.seed;
  if (raw.resume) cfg.resume = *raw.resume;
  if (raw.pin_field) cfg.pin_field = *raw.pin_field;
  if (raw.coupling) cfg.coupling = *raw.coupling;
  if (raw.n) cfg.n_spins = *raw.n;
  if (raw.side) cfg.side = (*raw.side == "fm" ? lrising::Side::FM : lrising::Side::AFM);
  if (raw.fit_form) cfg.fit_form = parse_fit_form(*raw.fit_form);

  if (app.got_subcommand(point)) {
    cfg.validate();
    if (cfg.theta.count != 1 || cfg.alphas.size() != 1)
      throw std::invalid_argument("point: single --theta and --alpha required");
    lrising::ChainParams p;
    p.n_spins = cfg.n_spins;
    p.alpha = cfg.alphas[0];
    p.theta = cfg.theta.min;
    p.coupling = cfg.coupling;
    p.sym_break_h = cfg.pin_field;
    lrising::RecordSchema schema;
    schema.with_temperature = !cfg.temps.empty();
    schema.with_bound = !cfg.temps.empty();
    lrising::SweepRecord rec;
    if (cfg.temps.empty()) {
      rec = lrising::evaluate_ground_point(p, cfg.seed);
    } else {
      if (cfg.temps.size() != 1) throw std::invalid_argument("point: single --temp required");
      rec = lrising::evaluate_thermal_point(p, cfg.temps, cfg.seed).at(0);
    }
    if (rec.status != "ok") {
      std::cout << ordered_json{{"error", {{"type", "solver"}, {"message", rec.status}}}}.dump()
                << '\n';
      return 3;
    }
    std::ostream* os = &std::cout;
    std::ofstream f;
    if (!cfg.out.empty()) {
      f.open(cfg.out);
      os = &f;
    }
    if (cfg.format == "csv") *os << schema.csv_header() << '\n' << schema.csv_row(rec) << '\n';
    else *os << schema.json_row(rec).dump() << '\n';
    return 0;
  }

  if (app.got_subcommand(phase)) {
    cfg.validate();
    lrising::RecordSchema schema;
    schema.with_slopes = cfg.sizes.size() >= 2;
    lrising::detail::RecordWriter writer(cfg.out, schema, cfg.format, cfg.resume);
    lrising::run_phase_diagram(cfg, &writer);
    return 0;
  }

  if (app.got_subcommand(thermal)) {
    cfg.validate();
    lrising::RecordSchema schema;
    schema.with_temperature = true;
    schema.with_bound = true;
    lrising::detail::RecordWriter writer(cfg.out, schema, cfg.format, cfg.resume);
    lrising::run_thermal(cfg, &writer);
    return 0;
  }

  if (app.got_subcommand(critical)) {
    cfg.validate();
    if (cfg.alphas.size() != 1) throw std::invalid_argument("critical: single --alpha required");
    if (cfg.sizes.size() < 4) throw std::invalid_argument("critical: >= 4 --sizes required");
    lrising::GapScanOptions opts;
    opts.workers = cfg.workers;
    opts.solver.seed = cfg.seed;
    const auto minima = lrising::per_size_minima(cfg.alphas[0], cfg.side, cfg.sizes, opts);
    const auto est =
        lrising::extrapolate_critical(cfg.alphas[0], cfg.sizes, cfg.side, opts, minima);
    const lrising::CollectiveLabel order_label =
        cfg.side == lrising::Side::FM ? lrising::CollectiveLabel{lrising::Axis::Z, false}
                                      : lrising::CollectiveLabel{lrising::Axis::Z, true};
    const auto ce = lrising::scaling_exponent_at_criticality(cfg.alphas[0], cfg.side, cfg.sizes,
                                                             order_label, cfg.fit_form, opts,
                                                             minima);
    ordered_json j;
    j["alpha"] = std::isinf(cfg.alphas[0]) ? ordered_json("inf") : ordered_json(cfg.alphas[0]);
    j["side"] = std::string(lrising::to_string(cfg.side));
    ordered_json per;
    for (const auto& [n, m] : est.per_size)
      per.push_back({{"N", n}, {"theta", m.theta}, {"gap", m.gap}, {"boundary", m.boundary}});
    j["per_size_minima"] = per;
    j["theta_inf"] = est.theta_inf;
    j["uncertainty"] = est.uncertainty;
    j["omega"] = est.omega;
    j["beta_c"] = ce.beta;
    j["beta_c_uncertainty"] = ce.uncertainty;
    j["beta_c_label"] = lrising::to_string(order_label);
    j["fit"] = fit_to_json(ce.fit);
    j["version"] = lrising::kVersion;
    emit(j, cfg.format, cfg.out);
    return 0;
  }

  if (app.got_subcommand(scaling)) {
    cfg.validate();
    if (cfg.alphas.size() != 1) throw std::invalid_argument("scaling: single --alpha required");
    if (cfg.sizes.size() < 2) throw std::invalid_argument("scaling: >= 2 --sizes required");
    const std::string obs = raw.observable.value_or("qfi");
    ordered_json j;
    j["alpha"] = std::isinf(cfg.alphas[0]) ? ordered_json("inf") : ordered_json(cfg.alphas[0]);
    j["observable"] = obs;
    if (obs == "qfi") {
      if (cfg.theta.count != 1) throw std::invalid_argument("scaling: single --theta required");
      const lrising::CollectiveLabel label = cfg.labels.at(0);
      std::vector<double> ns, vs;
      lrising::LanczosOptions lopts;
      lopts.seed = cfg.seed;
      for (int n : cfg.sizes) {
        ns.push_back(n);
        vs.push_back(lrising::qfi_at(cfg.alphas[0], cfg.theta.min, n, label, lopts));
      }
      j["theta"] = cfg.theta.min;
      j["label"] = lrising::to_string(label);
      j["values"] = vs;
      j["fit"] = fit_to_json(lrising::fit_power_law(ns, vs, cfg.fit_form));
    } else if (obs == "corr-size" || obs == "corr-dist") {
      lrising::GapScanOptions opts;
      opts.workers = cfg.workers;
      opts.solver.seed = cfg.seed;
      const auto mode = obs == "corr-size" ? lrising::CorrelationScanMode::SizeScan
                                           : lrising::CorrelationScanMode::DistanceScan;
      j["side"] = std::string(lrising::to_string(cfg.side));
      j["fit"] = fit_to_json(
          lrising::correlation_scaling(cfg.alphas[0], cfg.side, cfg.sizes, mode, opts));
    } else {
      throw std::invalid_argument("scaling: unknown observable " + obs);
    }
    j["version"] = lrising::kVersion;
    emit(j, cfg.format, cfg.out);
    return 0;
  }

  if (app.got_subcommand(oracle)) {
    ordered_json j;
    j["kind"] = oracle_kind;
    if (oracle_kind == "perturbative") {
      if (cfg.alphas.size() != 1) throw std::invalid_argument("oracle: single --alpha required");
      const double alpha = cfg.alphas[0];
      const long n = cfg.n_spins;
      const double theta = cfg.theta.min;
      const auto p = lrising::perturbative_qfi(n, alpha, theta);
      j["alpha"] = std::isinf(alpha) ? ordered_json("inf") : ordered_json(alpha);
      j["N"] = n;
      j["theta"] = theta;
      j["g"] = p.g_value;
      j["validity"] = p.validity;
      for (auto l : lrising::kAllLabels)
        j["f_" + lrising::to_string(l)] = p.qfi[lrising::label_index(l)];
      const bool gaps_ok = lrising::nearest_neighbor_only(alpha) || alpha > 1.0;
      const auto e = lrising::perturbative_energies(n, alpha, theta, gaps_ok);
      j["e_gs2"] = e.e_gs2;
      j["e_ex2"] = e.e_ex2;
      if (gaps_ok) {
        j["gap1"] = e.gap1;
        j["gap2"] = e.gap2;
        const int order = raw.order.value_or(1);
        const auto c = lrising::fm_critical_line(alpha, order);
        j["fm_critical_theta"] = c.theta_c;
        j["fm_critical_order"] = order;
      } else {
        j["finite_size_fm_theta"] = lrising::finite_size_fm_theta(n, alpha);
      }
      j["g_alpha_derivative"] = lrising::g_alpha_derivative(n, alpha);
      j["fidelity_susceptibility"] = lrising::fidelity_susceptibility(n, alpha, theta);
    } else if (oracle_kind == "variational") {
      const double theta = cfg.theta.min;
      const auto s = lrising::solve_sigma(cfg.n_spins, theta);
      j["N"] = cfg.n_spins;
      j["theta"] = theta;
      j["sigma2"] = s.sigma2;
      j["sigma2_closed"] = s.sigma2_closed;
      j["energy"] = s.energy;
      j["qfi_y"] = s.qfi_y;
      j["qfi_y_closed"] = s.qfi_y_closed;
      j["regime"] = std::string(lrising::to_string(s.regime));
      j["root_bracketed"] = s.root_bracketed;
    } else {
      throw std::invalid_argument("oracle kind must be perturbative or variational");
    }
    j["version"] = lrising::kVersion;
    emit(j, cfg.format, cfg.out);
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lrising::CapacityError& e) {
    std::cout << ordered_json{{"error", {{"type", "capacity"}, {"message", e.what()}}}}.dump()
              << '\n';
    return 4;
  } catch (const lrising::ConvergenceError& e) {
    std::cout << ordered_json{{"error",
                               {{"type", "convergence"},
                                {"message", e.what()},
                                {"best_residual", e.best_residual}}}}
                     .dump()
              << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cout << ordered_json{{"error", {{"type", "config"}, {"message", e.what()}}}}.dump()
              << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cout << ordered_json{{"error", {{"type", "config"}, {"message", e.what()}}}}.dump()
              << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cout << ordered_json{{"error", {{"type", "solver"}, {"message", e.what()}}}}.dump()
              << '\n';
    return 3;
  }
}
