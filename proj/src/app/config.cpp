#include "config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "lifespan/datum_json.hpp"

namespace lifespan::app {

using nlohmann::json;

namespace {

// Typed access to one JSON object with unknown-key rejection.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items())
      if (!ok.count(k)) throw ConfigError(path_ + ": unknown key '" + k + "'");
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& raw(const char* key) const { return j_.at(key); }
  std::string path(const char* key) const { return path_ + "." + key; }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
    return v.get<double>();
  }

  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(path(key) + ": expected an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      throw ConfigError(path(key) + ": out of range");
    return static_cast<int>(x);
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
    return v.get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
};

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ConfigError(path + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<double> radius_grid(const json& v, const std::string& path) {
  if (v.is_array()) return number_list(v, path);
  Section s(v, path);
  s.allow({"min", "max", "count"});
  if (!s.has("min") || !s.has("max") || !s.has("count")) throw ConfigError(path + ": needs min, max and count");
  try {
    return geometric_radii(s.number("min", 0), s.number("max", 0), s.integer("count", 0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ProblemSpec parse_problem(const json& j) {
  Section s(j, "problem");
  s.allow({"p", "datum"});
  if (!s.has("p") || !s.has("datum")) throw ConfigError("problem: needs p and datum");
  try {
    return ProblemSpec(datum_from_json(s.raw("datum")), s.number("p", 0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

Estimator parse_estimator(const json& j, std::uint64_t seed) {
  Section s(j, "density.estimator");
  const std::string kind = s.string("kind", "monte_carlo");
  if (kind == "monte_carlo") {
    s.allow({"kind", "samples"});
    const double samples = s.number("samples", 100000);
    if (!(samples >= 1) || samples != std::floor(samples)) throw ConfigError("density.estimator.samples: expected a count");
    return MonteCarlo{static_cast<std::size_t>(samples), seed};
  }
  if (kind == "grid") {
    s.allow({"kind", "resolution"});
    return GridOracle{s.integer("resolution", 256)};
  }
  throw ConfigError("density.estimator.kind: expected monte_carlo or grid");
}

CenterStrategy parse_centers(const json& v) {
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    if (name == "origin") return OriginCenter{};
    if (name == "auto") return AutoSearch{};
    throw ConfigError("density.centers: expected origin, auto, an auto object or a list of points");
  }
  if (v.is_array()) {
    ExplicitCenters c;
    for (const json& p : v) c.points.push_back(number_list(p, "density.centers"));
    return c;
  }
  Section s(v, "density.centers");
  s.allow({"auto"});
  Section a(s.raw("auto"), "density.centers.auto");
  a.allow({"scatter"});
  return AutoSearch{a.integer("scatter", 16)};
}

void parse_density(RunConfig& cfg, const json& j) {
  Section s(j, "density");
  s.allow({"alphas", "alpha_count", "radii", "snap_to_rings", "centers", "estimator", "from_csv"});
  cfg.has_density = true;
  if (s.has("from_csv")) {
    cfg.density_csv = s.string("from_csv", "");
    return;
  }
  DensityRequest& r = cfg.density;
  if (s.has("alphas") && s.has("alpha_count")) throw ConfigError("density: give alphas or alpha_count, not both");
  if (s.has("alphas")) {
    r.alphas = number_list(s.raw("alphas"), "density.alphas");
  } else if (cfg.problem) {
    const int count = s.integer("alpha_count", 16);
    if (count < 1) throw ConfigError("density.alpha_count: must be >= 1");
    r.alphas = default_alpha_grid(cfg.problem->datum.sup_norm(), count);
  }
  r.radii = s.has("radii") ? radius_grid(s.raw("radii"), "density.radii") : geometric_radii(8.0, 1024.0, 8);
  r.snap_to_rings = s.boolean("snap_to_rings", true);
  if (s.has("centers")) r.centers = parse_centers(s.raw("centers"));
  const json estimator = s.has("estimator") ? s.raw("estimator") : json::object();
  r.estimator = parse_estimator(estimator, cfg.seed.value_or(0));
  if (std::holds_alternative<MonteCarlo>(r.estimator) && !cfg.seed)
    throw ConfigError("seed: required when the density estimator is monte_carlo");
  r.workers = cfg.workers;
  try {
    r.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("density: ") + e.what());
  }
}

void parse_quadrature(RunConfig& cfg, const json& j) {
  Section s(j, "quadrature");
  s.allow({"nodes", "search_resolution", "refinement_rounds", "box"});
  QuadratureConfig& q = cfg.quadrature;
  q.nodes_per_axis = s.integer("nodes", q.nodes_per_axis);
  q.search_resolution = s.integer("search_resolution", q.search_resolution);
  q.refinement_rounds = s.integer("refinement_rounds", q.refinement_rounds);
  if (s.has("box")) {
    Section b(s.raw("box"), "quadrature.box");
    b.allow({"lower", "upper"});
    if (!b.has("lower") || !b.has("upper")) throw ConfigError("quadrature.box: needs lower and upper");
    q.box = SearchBox{number_list(b.raw("lower"), "quadrature.box.lower"),
                      number_list(b.raw("upper"), "quadrature.box.upper")};
  }
}

void parse_bounds(RunConfig& cfg, const json& j) {
  Section s(j, "bounds");
  s.allow({"weissler", "yamauchi"});
  if (s.has("weissler")) {
    Section w(s.raw("weissler"), "bounds.weissler");
    w.allow({"horizon", "tolerance", "growth"});
    WeisslerOptions& o = cfg.bounds.weissler;
    o.horizon = w.number("horizon", o.horizon);
    o.rel_tol = w.number("tolerance", o.rel_tol);
    o.growth = w.number("growth", o.growth);
    if (!(o.horizon > 0) || !(o.rel_tol > 0) || !(o.growth > 1))
      throw ConfigError("bounds.weissler: need horizon > 0, tolerance > 0, growth > 1");
  }
  if (s.has("yamauchi")) {
    Section y(s.raw("yamauchi"), "bounds.yamauchi");
    y.allow({"axis", "half_width", "radii", "directions"});
    ConeProbe probe = cfg.problem ? default_cone_probe(cfg.problem->datum) : ConeProbe{};
    if (y.has("axis")) probe.axis = number_list(y.raw("axis"), "bounds.yamauchi.axis");
    probe.half_width = y.number("half_width", probe.half_width);
    if (y.has("radii")) probe.radii = radius_grid(y.raw("radii"), "bounds.yamauchi.radii");
    probe.directions = y.integer("directions", probe.directions);
    probe.seed = cfg.seed.value_or(1);
    if (!(probe.half_width > 0 && probe.half_width < std::sqrt(2.0)))
      throw ConfigError("bounds.yamauchi.half_width: must lie in (0, sqrt 2)");
    if (probe.directions < 1) throw ConfigError("bounds.yamauchi.directions: must be >= 1");
    cfg.bounds.cone = probe;
  }
}

void parse_simulate(RunConfig& cfg, const json& j) {
  Section s(j, "simulate");
  s.allow({"half_period", "grid_points", "blowup_threshold", "safety", "t_max", "snapshot_stride", "fit_window",
           "laplacian"});
  cfg.has_simulate = true;
  SimulationConfig& c = cfg.simulate;
  c.half_period = s.number("half_period", c.half_period);
  c.grid_points = s.integer("grid_points", c.grid_points);
  c.blowup_threshold = s.number("blowup_threshold", c.blowup_threshold);
  c.safety = s.number("safety", c.safety);
  c.t_max = s.number("t_max", c.t_max);
  c.snapshot_stride = s.integer("snapshot_stride", c.snapshot_stride);
  c.fit_window = s.integer("fit_window", c.fit_window);
  const std::string lap = s.string("laplacian", "fourier");
  if (lap == "fourier")
    c.laplacian = LaplacianRoute::Fourier;
  else if (lap == "stencil")
    c.laplacian = LaplacianRoute::Stencil;
  else
    throw ConfigError("simulate.laplacian: expected fourier or stencil");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void parse_verify(RunConfig& cfg, const json& j) {
  Section s(j, "verify");
  s.allow({"sandwich_tolerance", "semigroup_times", "semigroup_tolerance", "jensen_lag", "jensen_floor", "kernel"});
  VerifySection& v = cfg.verify;
  v.sandwich_tolerance = s.number("sandwich_tolerance", v.sandwich_tolerance);
  if (s.has("semigroup_times")) v.semigroup_times = number_list(s.raw("semigroup_times"), "verify.semigroup_times");
  v.semigroup_tolerance = s.number("semigroup_tolerance", v.semigroup_tolerance);
  v.jensen_lag = s.number("jensen_lag", v.jensen_lag);
  v.jensen_floor = s.number("jensen_floor", v.jensen_floor);
  for (double t : v.semigroup_times)
    if (!(t > 0)) throw ConfigError("verify.semigroup_times: times must be > 0");
  if (!(v.jensen_lag > 0)) throw ConfigError("verify.jensen_lag: must be > 0");
  if (s.has("kernel")) {
    Section k(s.raw("kernel"), "verify.kernel");
    k.allow({"dimensions", "t", "s", "nodes", "trials"});
    KernelCheckSection& ks = v.kernel;
    if (k.has("dimensions")) {
      ks.dimensions.clear();
      for (double d : number_list(k.raw("dimensions"), "verify.kernel.dimensions")) {
        if (d != std::floor(d) || d < 1 || d > kMaxDimension)
          throw ConfigError("verify.kernel.dimensions: entries must be 1, 2 or 3");
        ks.dimensions.push_back(static_cast<int>(d));
      }
    }
    ks.t = k.number("t", ks.t);
    ks.s = k.number("s", ks.s);
    ks.nodes = k.integer("nodes", ks.nodes);
    ks.trials = k.integer("trials", ks.trials);
    if (!(ks.t > 0) || !(ks.s > 0) || ks.nodes < 8 || ks.trials < 1)
      throw ConfigError("verify.kernel: need t, s > 0, nodes >= 8, trials >= 1");
  }
}

void parse_outputs(RunConfig& cfg, const json& j) {
  Section s(j, "outputs");
  s.allow({"dir", "history", "snapshots"});
  cfg.outputs.dir = s.string("dir", cfg.outputs.dir);
  cfg.outputs.history = s.boolean("history", cfg.outputs.history);
  cfg.outputs.snapshots = s.boolean("snapshots", cfg.outputs.snapshots);
}

}  // namespace

const ProblemSpec& RunConfig::require_problem() const {
  if (!problem) throw ConfigError("problem: section required for this command");
  return *problem;
}

std::string config_hash(const json& effective) {
  json hashed = effective;
  hashed.erase("workers");
  hashed.erase("outputs");
  const std::string text = hashed.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(json doc, const OverrideFlags& overrides) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.workers) doc["workers"] = *overrides.workers;
  if (overrides.out_dir) doc["outputs"]["dir"] = *overrides.out_dir;

  Section top(doc, "config");
  top.allow({"seed", "workers", "problem", "density", "quadrature", "bounds", "simulate", "verify", "outputs"});

  RunConfig cfg;
  if (top.has("seed")) {
    const json& s = top.raw("seed");
    if (!s.is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.workers = top.integer("workers", 1);
  if (cfg.workers < 0) throw ConfigError("workers: must be >= 0");

  if (top.has("problem")) cfg.problem = parse_problem(top.raw("problem"));
  if (top.has("quadrature")) parse_quadrature(cfg, top.raw("quadrature"));
  cfg.quadrature.workers = cfg.workers;
  if (cfg.problem) {
    try {
      cfg.quadrature.validate(cfg.problem->datum.dimension());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("quadrature: ") + e.what());
    }
  }
  if (top.has("density")) parse_density(cfg, top.raw("density"));
  if (top.has("bounds")) parse_bounds(cfg, top.raw("bounds"));
  cfg.bounds.workers = cfg.workers;
  if (top.has("simulate")) parse_simulate(cfg, top.raw("simulate"));
  if (top.has("verify")) parse_verify(cfg, top.raw("verify"));
  if (top.has("outputs")) parse_outputs(cfg, top.raw("outputs"));

  cfg.effective = std::move(doc);
  cfg.hash = config_hash(cfg.effective);
  return cfg;
}

RunConfig load_config(const std::string& path, const OverrideFlags& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg = parse_config(std::move(doc), overrides);
  if (cfg.density_csv) {
    std::filesystem::path p(*cfg.density_csv);
    if (p.is_relative()) cfg.density_csv = (std::filesystem::path(path).parent_path() / p).string();
  }
  return cfg;
}

}  // namespace lifespan::app
