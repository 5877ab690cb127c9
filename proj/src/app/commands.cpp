#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "csv.hpp"
#include "lifespan/gauss_hermite.hpp"

namespace lifespan::app {

namespace fs = std::filesystem;

void Console::info(const std::string& line) const {
  if (!quiet) *out << line << '\n';
}

void Console::error(const std::string& line) const { *err << "error: " << line << '\n'; }

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.outputs.dir);
  return (fs::path(cfg.outputs.dir) / name).string();
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : "unavailable"; }

std::string status_of(bool pass) { return pass ? "pass" : "fail"; }

DensityReport obtain_density(const RunConfig& cfg, const Console& console) {
  const ProblemSpec& spec = cfg.require_problem();
  if (cfg.density_csv) {
    console.info("reading density report " + *cfg.density_csv);
    DensityReport report;
    try {
      report = read_density_csv(*cfg.density_csv);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("density.from_csv: ") + e.what());
    }
    if (report.dimension != spec.datum.dimension())
      throw ConfigError("density.from_csv: report dimension differs from the datum");
    if (auto* mc = std::get_if<MonteCarlo>(&report.estimator)) mc->seed = cfg.seed.value_or(1);
    return report;
  }
  if (!cfg.has_density) throw ConfigError("density: section required for this command");
  console.info("estimating densities with " + estimator_name(cfg.density.estimator));
  return density_profile(spec.datum, cfg.density);
}

LifespanBounds compute_bounds(const RunConfig& cfg, const DensityReport& report, const Console& console) {
  console.info("evaluating bounds");
  return bounds_report(cfg.require_problem(), report, cfg.quadrature, cfg.bounds);
}

std::string row_flags(const LifespanBounds& b, const std::string& name) {
  std::string out;
  for (const ConsistencyFlag& f : b.flags) {
    const std::string token = "_" + name;
    const bool mine = f.name.rfind(name + "_", 0) == 0 || (f.name.size() >= token.size() &&
                                                          f.name.compare(f.name.size() - token.size(), token.size(),
                                                                         token) == 0);
    if (!mine) continue;
    if (!out.empty()) out += ';';
    out += f.name + "=" + status_of(f.pass);
  }
  return out;
}

void write_bounds_csv(const std::string& path, const LifespanBounds& b, const std::string& hash) {
  CsvWriter w(path, hash, {"name", "value", "available", "parameters", "flags"});
  for (const BoundRow* r : b.rows()) {
    std::string params = r->parameters;
    if (!r->note.empty()) params += (params.empty() ? "" : ";") + std::string("note=") + r->note;
    w.row({r->name, optional_number(r->value), r->value ? "true" : "false", params, row_flags(b, r->name)});
  }
}

const char* status_name(BlowupStatus s) { return s == BlowupStatus::BlewUp ? "blew_up" : "no_blowup_within_horizon"; }

void write_simulation(const RunConfig& cfg, const BlowupEstimate& e) {
  {
    CsvWriter w(out_path(cfg, "blowup.csv"), cfg.hash,
                {"status", "T_num", "fit_residual", "t_stop", "steps", "min_value", "half_period", "grid_points"});
    w.row({status_name(e.status), e.t_num ? format_number(*e.t_num) : "", format_number(e.fit_residual),
           format_number(e.t_stop), std::to_string(e.steps), format_number(e.min_value),
           format_number(cfg.simulate.half_period), std::to_string(cfg.simulate.grid_points)});
  }
  if (cfg.outputs.history) {
    CsvWriter w(out_path(cfg, "history.csv"), cfg.hash, {"t", "sup_norm"});
    for (const HistoryPoint& h : e.history) w.row({format_number(h.t), format_number(h.sup_norm)});
  }
  if (cfg.outputs.snapshots) {
    for (std::size_t i = 0; i < e.snapshots.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%04zu.txt", i);
      std::ofstream os(out_path(cfg, name));
      e.snapshots[i].write(os);
    }
  }
}

void write_numerical_failure(const RunConfig& cfg, const NumericalFailure& f) {
  CsvWriter w(out_path(cfg, "blowup.csv"), cfg.hash,
              {"status", "T_num", "fit_residual", "t_stop", "steps", "min_value", "half_period", "grid_points"});
  w.row({"numerical_failure", "", "", format_number(f.time()), "", "", format_number(cfg.simulate.half_period),
         std::to_string(cfg.simulate.grid_points)});
}

BlowupEstimate simulate_or_report(const RunConfig& cfg, const Console& console) {
  console.info("simulating on [-" + format_number(cfg.simulate.half_period) + ", " +
               format_number(cfg.simulate.half_period) + ") with N = " + std::to_string(cfg.simulate.grid_points));
  try {
    return run(cfg.require_problem(), cfg.simulate);
  } catch (const NumericalFailure& f) {
    write_numerical_failure(cfg, f);
    throw;
  }
}

std::vector<VerifyRow> kernel_rows(const KernelCheckSection& k, std::uint64_t seed) {
  std::vector<VerifyRow> rows;
  for (int dim : k.dimensions) {
    const KernelCheckReport r = kernel_selfcheck(dim, k.t, k.s, {k.nodes, k.trials, seed});
    const std::string d = "n=" + std::to_string(dim) + ";t=" + format_number(k.t) + ";s=" + format_number(k.s) +
                          ";nodes=" + std::to_string(k.nodes);
    const std::pair<const char*, std::pair<double, double>> checks[] = {
        {"kernel_symmetry", {r.symmetry_residual, 0.0}},
        {"kernel_translation", {r.translation_residual, 0.0}},
        {"kernel_semigroup", {r.semigroup_residual, 1e-8}},
        {"kernel_conservation", {r.conservation_residual, 1e-10}},
    };
    for (const auto& [name, vt] : checks)
      rows.push_back({name, vt.first, vt.second, status_of(vt.first <= vt.second), d});
  }
  return rows;
}

void write_verify_csv(const std::string& path, const std::vector<VerifyRow>& rows, const std::string& hash) {
  CsvWriter w(path, hash, {"check", "value", "threshold", "status", "detail"});
  for (const VerifyRow& r : rows)
    w.row({r.check, format_number(r.value), format_number(r.threshold), r.status, r.detail});
}

bool all_pass(const std::vector<VerifyRow>& rows) {
  return std::none_of(rows.begin(), rows.end(), [](const VerifyRow& r) { return r.status == "fail"; });
}

}  // namespace

void write_density_csv(const std::string& path, const DensityReport& report, const std::string& hash) {
  std::vector<std::string> columns{"alpha", "r"};
  for (int d = 0; d < report.dimension; ++d) columns.push_back("center_" + std::to_string(d));
  for (const char* c : {"density", "estimator", "samples_or_resolution", "kind"}) columns.push_back(c);
  CsvWriter w(path, hash, columns);
  const std::string est = estimator_name(report.estimator);
  const std::string size = std::to_string(estimator_size(report.estimator));
  auto emit = [&](double alpha, double r, const Point& center, double density, const char* kind) {
    std::vector<std::string> f{format_number(alpha), format_number(r)};
    for (int d = 0; d < report.dimension; ++d) f.push_back(format_number(center.empty() ? 0.0 : center[d]));
    f.insert(f.end(), {format_number(density), est, size, kind});
    w.row(f);
  };
  const Point origin(static_cast<std::size_t>(report.dimension), 0.0);
  for (const DensitySample& s : report.samples) {
    emit(s.alpha, s.radius, origin, s.origin_density, "origin");
    emit(s.alpha, s.radius, s.best_center, s.best_density, "center_sup");
  }
  for (const DensityEstimate& e : report.estimates) {
    emit(e.alpha, e.d_origin_radius, origin, e.d_origin, "D_origin");
    emit(e.alpha, e.d_bar_radius, e.d_bar_center, e.d_bar, "D_bar");
  }
}

DensityReport read_density_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  auto num = [](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw std::invalid_argument("density csv: bad number '" + s + "'");
    return v;
  };
  DensityReport report;
  std::vector<std::size_t> centre_cols;
  for (int d = 0;; ++d) {
    auto it = std::find(t.columns.begin(), t.columns.end(), "center_" + std::to_string(d));
    if (it == t.columns.end()) break;
    centre_cols.push_back(static_cast<std::size_t>(it - t.columns.begin()));
  }
  if (centre_cols.empty() || centre_cols.size() > kMaxDimension)
    throw std::invalid_argument("density csv: expected center_0.. columns");
  report.dimension = static_cast<int>(centre_cols.size());
  const std::size_t c_alpha = t.column("alpha"), c_r = t.column("r"), c_density = t.column("density"),
                    c_est = t.column("estimator"), c_size = t.column("samples_or_resolution"),
                    c_kind = t.column("kind");

  std::map<std::pair<double, double>, DensitySample> cells;
  std::map<double, DensityEstimate> estimates;
  std::vector<double> alpha_order;
  for (const auto& row : t.rows) {
    const double alpha = num(row[c_alpha]);
    const double r = num(row[c_r]);
    const double density = num(row[c_density]);
    if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("density csv: density outside [0, 1]");
    Point center;
    for (std::size_t c : centre_cols) center.push_back(num(row[c]));
    const std::string& kind = row[c_kind];
    const double size = num(row[c_size]);
    if (row[c_est] == "monte_carlo")
      report.estimator = MonteCarlo{static_cast<std::size_t>(size), 0};
    else if (row[c_est] == "grid_oracle")
      report.estimator = GridOracle{static_cast<int>(size)};
    else
      throw std::invalid_argument("density csv: unknown estimator '" + row[c_est] + "'");
    if (kind == "origin" || kind == "center_sup") {
      DensitySample& s = cells[{alpha, r}];
      s.alpha = alpha;
      s.radius = r;
      if (kind == "origin") {
        s.origin_density = density;
      } else {
        s.best_center = center;
        s.best_density = density;
      }
    } else if (kind == "D_origin" || kind == "D_bar") {
      if (!estimates.count(alpha)) alpha_order.push_back(alpha);
      DensityEstimate& e = estimates[alpha];
      e.alpha = alpha;
      if (kind == "D_origin") {
        e.d_origin = density;
        e.d_origin_radius = r;
      } else {
        e.d_bar = density;
        e.d_bar_radius = r;
        e.d_bar_center = center;
      }
    } else {
      throw std::invalid_argument("density csv: unknown kind '" + kind + "'");
    }
  }
  if (estimates.empty()) throw std::invalid_argument("density csv: no D_origin/D_bar rows");
  for (const auto& [key, s] : cells) {
    report.samples.push_back(s);
    if (std::find(report.radii.begin(), report.radii.end(), key.second) == report.radii.end())
      report.radii.push_back(key.second);
  }
  std::sort(report.radii.begin(), report.radii.end());
  for (double a : alpha_order) report.estimates.push_back(estimates[a]);
  return report;
}

int cmd_density(const RunConfig& cfg, const Console& console) {
  const DensityReport report = obtain_density(cfg, console);
  write_density_csv(out_path(cfg, "density.csv"), report, cfg.hash);
  for (const DensityEstimate& e : report.estimates)
    console.info("alpha=" + format_number(e.alpha) + " D_origin=" + format_number(e.d_origin) +
                 " D_bar=" + format_number(e.d_bar));
  return kExitOk;
}

int cmd_bounds(const RunConfig& cfg, const Console& console) {
  const DensityReport report = obtain_density(cfg, console);
  if (!cfg.density_csv) write_density_csv(out_path(cfg, "density.csv"), report, cfg.hash);
  const LifespanBounds b = compute_bounds(cfg, report, console);
  write_bounds_csv(out_path(cfg, "bounds.csv"), b, cfg.hash);
  for (const BoundRow* r : b.rows()) console.info(r->name + " = " + optional_number(r->value));
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const Console& console) {
  const BlowupEstimate e = simulate_or_report(cfg, console);
  write_simulation(cfg, e);
  console.info(std::string(status_name(e.status)) + (e.t_num ? " T_num=" + format_number(*e.t_num) : "") +
               " t_stop=" + format_number(e.t_stop) + " steps=" + std::to_string(e.steps));
  return kExitOk;
}

int cmd_kernel_check(const RunConfig& cfg, const Console& console) {
  const std::vector<VerifyRow> rows = kernel_rows(cfg.verify.kernel, cfg.seed.value_or(1));
  write_verify_csv(out_path(cfg, "kernel_check.csv"), rows, cfg.hash);
  for (const VerifyRow& r : rows) console.info(r.check + " " + r.detail + " " + format_number(r.value) + " " + r.status);
  return all_pass(rows) ? kExitOk : kExitVerifyFailed;
}

int cmd_verify(const RunConfig& cfg, const Console& console) {
  const ProblemSpec& spec = cfg.require_problem();
  const VerifySection& v = cfg.verify;
  std::vector<VerifyRow> rows;

  const DensityReport report = obtain_density(cfg, console);
  if (!cfg.density_csv) write_density_csv(out_path(cfg, "density.csv"), report, cfg.hash);
  const LifespanBounds b = compute_bounds(cfg, report, console);
  write_bounds_csv(out_path(cfg, "bounds.csv"), b, cfg.hash);

  std::optional<BlowupEstimate> sim;
  if (cfg.has_simulate) {
    sim = simulate_or_report(cfg, console);
    write_simulation(cfg, *sim);
  }

  // Sandwich: lower <= T_num <= every available upper bound.
  const double tol = v.sandwich_tolerance;
  if (!sim) {
    rows.push_back({"sandwich", 0.0, 0.0, "skip", "no simulate section"});
  } else if (sim->t_num) {
    const BlowupEstimate& e = *sim;
    const double t = *e.t_num;
    const double lo = *b.lower.value * (1.0 - tol);
    rows.push_back({"sandwich_lower", t, lo, status_of(t >= lo), "T_num >= lower*(1-tol)"});
    for (const BoundRow* u : b.available_uppers()) {
      const double hi = *u->value * (1.0 + tol);
      rows.push_back({"sandwich_" + u->name, t, hi, status_of(t <= hi), "T_num <= " + u->name + "*(1+tol)"});
    }
  } else {
    const BlowupEstimate& e = *sim;
    for (const BoundRow* u : b.available_uppers()) {
      const double hi = *u->value * (1.0 + tol);
      const bool contradicted = e.t_stop > hi;
      rows.push_back({"sandwich_" + u->name, e.t_stop, hi, contradicted ? "fail" : "skip",
                      contradicted ? "no blow-up although t_stop exceeds the upper bound"
                                   : "no blow-up before t_stop"});
    }
  }

  // Semigroup lower bound sup_z e^{tΔ}φ >= α D̄(α) - tol α.
  for (double t : v.semigroup_times) {
    const SupResult s = semigroup_sup(spec.datum, t, cfg.quadrature);
    double worst = std::numeric_limits<double>::infinity();
    std::string where = "no alpha with D_bar > 0";
    for (const DensityEstimate& d : report.estimates) {
      if (!(d.d_bar > 0.0)) continue;
      const double margin = s.value - (d.alpha * d.d_bar - v.semigroup_tolerance * d.alpha);
      if (margin < worst) {
        worst = margin;
        where = "alpha=" + format_number(d.alpha) + ";D_bar=" + format_number(d.d_bar);
      }
    }
    const bool any = std::isfinite(worst);
    rows.push_back({"semigroup_t=" + format_number(t), s.value, any ? s.value - worst : 0.0,
                    any ? status_of(worst >= 0.0) : "skip", where});
  }

  for (VerifyRow& r : kernel_rows(v.kernel, cfg.seed.value_or(1))) rows.push_back(std::move(r));

  // Jensen on each stored snapshot, at the origin.
  const GaussHermiteRule& rule = gauss_hermite(cfg.quadrature.nodes_per_axis);
  const Point z(static_cast<std::size_t>(spec.datum.dimension()), 0.0);
  const std::vector<Snapshot> none;
  for (const Snapshot& s : sim ? sim->snapshots : none) {
    const double residual = jensen_check(s, s.t + v.jensen_lag, z, rule, spec.p);
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    const bool constant = *lo == *hi;
    // Both integrals are O(sup^p); the floor is relative to that scale.
    const double floor = v.jensen_floor * std::max(1.0, std::pow(std::max(std::fabs(*lo), std::fabs(*hi)), spec.p));
    const bool pass = residual >= floor && (constant || residual > 0.0);
    rows.push_back({"jensen", residual, floor, status_of(pass),
                    "s=" + format_number(s.t) + (constant ? ";constant" : ";strict")});
  }

  for (const ConsistencyFlag& f : b.flags) rows.push_back({"flag_" + f.name, f.pass ? 1.0 : 0.0, 1.0,
                                                           status_of(f.pass), f.detail});

  write_verify_csv(out_path(cfg, "verify.csv"), rows, cfg.hash);
  bool ok = true;
  for (const VerifyRow& r : rows) {
    if (r.status == "fail") {
      ok = false;
      console.error("check failed: " + r.check + " value=" + format_number(r.value) +
                    " threshold=" + format_number(r.threshold) + " " + r.detail);
    }
  }
  console.info(ok ? "verify: all checks pass" : "verify: FAILED");
  return ok ? kExitOk : kExitVerifyFailed;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Life-span bounds and blow-up simulation for u_t = Δu + |u|^{p-1}u"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int workers = 1;
  bool quiet = false;
  auto* config_opt = app.add_option("--config", config_path, "JSON run configuration")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides outputs.dir)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides config)");
  auto* workers_opt = app.add_option("--workers", workers, "worker threads; 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", quiet, "suppress progress output");
  (void)config_opt;

  const std::pair<const char*, int (*)(const RunConfig&, const Console&)> commands[] = {
      {"density", cmd_density},   {"bounds", cmd_bounds},           {"simulate", cmd_simulate},
      {"verify", cmd_verify},     {"kernel-check", cmd_kernel_check},
  };
  for (const auto& [name, fn] : commands) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  Console console{quiet, &out, &err};
  OverrideFlags overrides;
  if (*seed_opt) overrides.seed = seed;
  if (*out_opt) overrides.out_dir = out_dir;
  if (*workers_opt) overrides.workers = workers;

  try {
    const RunConfig cfg = load_config(config_path, overrides);
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) return fn(cfg, console);
  } catch (const ConfigError& e) {
    console.error(e.what());
    return kExitConfigError;
  } catch (const NumericalFailure& e) {
    console.error(e.what());
    return kExitNumericalFailure;
  } catch (const std::invalid_argument& e) {
    console.error(e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    console.error(std::string("numerical failure: ") + e.what());
    return kExitNumericalFailure;
  }
  return kExitConfigError;
}

}  // namespace lifespan::app
