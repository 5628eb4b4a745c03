#include "ksg/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ksg/errors.hpp"

namespace ksg {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Typed access to one JSON object; rejects unknown keys.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key) && !node_.at(key).is_null(); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!node_.contains(key)) throw ConfigError(path_ + "." + key + ": missing");
    return node_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(name(key) + ": expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) {
    used_.insert(key);
    return has(key) ? number(key) : fallback;
  }

  long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(name(key) + ": expected an integer");
    return v.get<long>();
  }
  long integer(const std::string& key, long fallback) {
    used_.insert(key);
    return has(key) ? integer(key) : fallback;
  }

  std::string text(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(name(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    return has(key) ? text(key) : fallback;
  }

  Section child(const std::string& key) { return Section(raw(key), name(key)); }

  std::string name(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, _] : node_.items()) {
      if (!used_.count(key)) throw ConfigError(path_ + ": unknown key \"" + key + "\"");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

SourceKind parse_source(Section s) {
  const std::string kind = s.text("kind");
  SourceKind out;
  if (kind == "gompertz") {
    out = Gompertz{s.number("alpha"), s.number("K")};
  } else if (kind == "logistic") {
    out = Logistic{s.number("a"), s.number("b")};
  } else if (kind == "sublogistic") {
    out = SubLogistic{s.number("a"), s.number("b")};
  } else if (kind == "none") {
    out = NoSource{};
  } else {
    throw ConfigError(s.name("kind") + ": unknown source kind \"" + kind + "\"");
  }
  s.finish();
  return out;
}

GaussianInit parse_gaussian(Section& s) {
  const json& center = s.raw("center");
  if (!center.is_array() || center.size() != 2 || !center[0].is_number() || !center[1].is_number()) {
    throw ConfigError(s.name("center") + ": expected [x, y]");
  }
  GaussianInit g{center[0].get<double>(), center[1].get<double>(), s.number("width"),
                 s.number("total_mass")};
  return g;
}

InitialSpec parse_initial(Section s, const std::filesystem::path& base_dir) {
  const std::string kind = s.text("kind");
  InitialSpec out;
  if (kind == "uniform") {
    out = UniformInit{s.number("value")};
  } else if (kind == "gaussian") {
    out = parse_gaussian(s);
  } else if (kind == "sum_of_gaussians") {
    const json& bumps = s.raw("bumps");
    if (!bumps.is_array() || bumps.empty()) {
      throw ConfigError(s.name("bumps") + ": expected a non-empty list");
    }
    SumOfGaussiansInit sum;
    for (std::size_t i = 0; i < bumps.size(); ++i) {
      Section b(bumps[i], s.name("bumps") + "[" + std::to_string(i) + "]");
      sum.bumps.push_back(parse_gaussian(b));
      b.finish();
    }
    out = sum;
  } else if (kind == "file") {
    std::filesystem::path p = s.text("path");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    out = FileInit{p.string()};
  } else {
    throw ConfigError(s.name("kind") + ": unknown initial kind \"" + kind + "\"");
  }
  s.finish();
  return out;
}

ordered_json render_source(const SourceKind& kind) {
  ordered_json j;
  j["kind"] = std::string(source_name(kind));
  if (const auto* g = std::get_if<Gompertz>(&kind)) {
    j["alpha"] = g->alpha;
    j["K"] = g->K;
  } else if (const auto* l = std::get_if<Logistic>(&kind)) {
    j["a"] = l->a;
    j["b"] = l->b;
  } else if (const auto* sl = std::get_if<SubLogistic>(&kind)) {
    j["a"] = sl->a;
    j["b"] = sl->b;
  }
  return j;
}

ordered_json render_gaussian(const GaussianInit& g) {
  ordered_json j;
  j["center"] = {g.cx, g.cy};
  j["width"] = g.width;
  j["total_mass"] = g.total_mass;
  return j;
}

ordered_json render_initial(const InitialSpec& spec) {
  ordered_json j;
  if (const auto* u = std::get_if<UniformInit>(&spec)) {
    j["kind"] = "uniform";
    j["value"] = u->value;
  } else if (const auto* g = std::get_if<GaussianInit>(&spec)) {
    j["kind"] = "gaussian";
    const ordered_json fields = render_gaussian(*g);
    for (auto& [k, v] : fields.items()) j[k] = v;
  } else if (const auto* s = std::get_if<SumOfGaussiansInit>(&spec)) {
    j["kind"] = "sum_of_gaussians";
    j["bumps"] = ordered_json::array();
    for (const auto& b : s->bumps) j["bumps"].push_back(render_gaussian(b));
  } else if (const auto* f = std::get_if<FileInit>(&spec)) {
    j["kind"] = "file";
    j["path"] = f->path;
  }
  return j;
}

void validate_initial(const InitialSpec& spec, const char* field) {
  const std::string name(field);
  auto check_gaussian = [&](const GaussianInit& g) {
    if (!std::isfinite(g.cx) || !std::isfinite(g.cy)) throw ConfigError(name + ".center must be finite");
    if (!(g.width > 0.0)) throw ConfigError(name + ".width must be positive");
    if (!(g.total_mass > 0.0) || !std::isfinite(g.total_mass)) {
      throw ConfigError(name + ".total_mass must be positive (" + name + " > 0)");
    }
  };
  if (const auto* u = std::get_if<UniformInit>(&spec)) {
    if (!(u->value > 0.0) || !std::isfinite(u->value)) {
      throw ConfigError(name + ".value must be positive (" + name + " > 0)");
    }
  } else if (const auto* g = std::get_if<GaussianInit>(&spec)) {
    check_gaussian(*g);
  } else if (const auto* s = std::get_if<SumOfGaussiansInit>(&spec)) {
    if (s->bumps.empty()) throw ConfigError(name + ".bumps must not be empty");
    for (const auto& b : s->bumps) check_gaussian(b);
  } else if (const auto* f = std::get_if<FileInit>(&spec)) {
    if (f->path.empty()) throw ConfigError(name + ".path must not be empty");
  }
}

ScalarField gaussian_field(const Grid& grid, const GaussianInit& g) {
  ScalarField w = sample(grid, [&](double x, double y) {
    const double dx = x - g.cx;
    const double dy = y - g.cy;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * g.width * g.width));
  });
  const double total = integrate(w);
  if (!(total > 0.0)) {
    throw ConfigError("initial: Gaussian bump has no mass on the grid (center too far outside)");
  }
  for (double& v : w.values()) v *= g.total_mass / total;
  return w;
}

ScalarField read_field_file(const Grid& grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("initial: cannot open field file \"" + path + "\"");
  std::vector<double> values;
  std::string token;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::replace(content.begin(), content.end(), ',', ' ');
  std::istringstream tokens(content);
  while (tokens >> token) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ConfigError("initial: bad number \"" + token + "\" in \"" + path + "\"");
    }
  }
  if (values.size() != grid.cells()) {
    throw ConfigError("initial: \"" + path + "\" holds " + std::to_string(values.size()) +
                      " values, grid needs " + std::to_string(grid.cells()));
  }
  return ScalarField(grid, std::move(values));
}

// Gaussian data: add floor * peak everywhere, then rescale to the requested
// mass so that u0 > 0 without materially changing the mass.
ScalarField build_field(const InitialSpec& spec, const Grid& grid, double floor_rel) {
  auto floored = [&](ScalarField w, double mass) {
    const double peak = field_norms(w).linf_max;
    for (double& v : w.values()) v += floor_rel * peak;
    const double total = integrate(w);
    for (double& v : w.values()) v *= mass / total;
    return w;
  };
  if (const auto* u = std::get_if<UniformInit>(&spec)) return ScalarField(grid, u->value);
  if (const auto* g = std::get_if<GaussianInit>(&spec)) return floored(gaussian_field(grid, *g), g->total_mass);
  if (const auto* s = std::get_if<SumOfGaussiansInit>(&spec)) {
    ScalarField sum(grid);
    double mass = 0.0;
    for (const auto& b : s->bumps) {
      const ScalarField w = gaussian_field(grid, b);
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += w[k];
      mass += b.total_mass;
    }
    return floored(std::move(sum), mass);
  }
  return read_field_file(grid, std::get<FileInit>(spec).path);
}

}  // namespace

Grid make_grid(const GridSpec& spec) { return build_grid(spec.lx, spec.ly, spec.nx, spec.ny); }

void validate(const SimConfig& c) {
  make_grid(c.grid);
  validate(c.model);
  validate_initial(c.initial, "u0");
  if (!(c.initial_floor > 0.0) || !(c.initial_floor < 1.0)) {
    throw ConfigError("initial_floor must lie in (0, 1)");
  }
  if (c.model.tau == 1) {
    if (!c.v0) throw ConfigError("v0: required when tau = 1");
    if (const auto* u = std::get_if<UniformInit>(&*c.v0)) {
      if (!(u->value >= 0.0) || !std::isfinite(u->value)) throw ConfigError("v0.value must be >= 0");
    } else {
      validate_initial(*c.v0, "v0");
    }
  }
  validate(c.control);
  if (!(c.solver.rel_tol > 0.0 && c.solver.rel_tol < 1.0)) {
    throw ConfigError("solver: rel_tol must lie in (0, 1)");
  }
  if (!(c.classifier.bounded_factor > 1.0)) throw ConfigError("classifier: bounded_factor must exceed 1");
  if (!(c.classifier.terminal_growth_tol >= 0.0)) {
    throw ConfigError("classifier: terminal_growth_tol must be >= 0");
  }
  if (c.analysis.gn_constant && !(*c.analysis.gn_constant > 0.0)) {
    throw ConfigError("analysis: gn_constant must be positive");
  }
  if (c.analysis.budget.multistarts < 1) throw ConfigError("analysis: multistarts must be >= 1");
  if (c.analysis.budget.ascent_iterations < 0) {
    throw ConfigError("analysis: ascent_iterations must be >= 0");
  }
}

SimConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }

  SimConfig c;
  Section root(doc, "config");

  {
    Section g = root.child("grid");
    c.grid.lx = g.number("Lx", c.grid.lx);
    c.grid.ly = g.number("Ly", c.grid.ly);
    c.grid.nx = g.integer("nx", c.grid.nx);
    c.grid.ny = g.integer("ny", c.grid.ny);
    g.finish();
  }
  {
    Section m = root.child("model");
    c.model.chi = m.number("chi");
    c.model.tau = static_cast<int>(m.integer("tau"));
    c.model.source = parse_source(m.child("source"));
    m.finish();
  }
  c.initial = parse_initial(root.child("initial"), base_dir);
  c.initial_floor = root.number("initial_floor", c.initial_floor);
  if (root.has("v0")) {
    // kept for sweeps that switch tau, but unused while tau = 0
    c.v0 = parse_initial(root.child("v0"), base_dir);
    if (c.model.tau == 0) {
      c.warnings.push_back("v0 is ignored for tau = 0 (v is obtained from the elliptic equation)");
    }
  }
  if (root.has("time")) {
    Section t = root.child("time");
    auto& ctl = c.control;
    ctl.t_end = t.number("t_end", ctl.t_end);
    ctl.dt_init = t.number("dt_init", ctl.dt_init);
    ctl.dt_min = t.number("dt_min", ctl.dt_min);
    ctl.dt_max = t.number("dt_max", ctl.dt_max);
    ctl.cfl_safety = t.number("cfl_safety", ctl.cfl_safety);
    ctl.record_every = t.number("record_every", ctl.record_every);
    ctl.record_every_steps = t.integer("record_every_steps", ctl.record_every_steps);
    ctl.overflow_factor = t.number("overflow_factor", ctl.overflow_factor);
    t.finish();
  }
  if (root.has("solver")) {
    Section s = root.child("solver");
    c.solver.rel_tol = s.number("rel_tol", c.solver.rel_tol);
    c.solver.max_iter = s.integer("max_iter", c.solver.max_iter);
    s.finish();
  }
  if (root.has("classifier")) {
    Section s = root.child("classifier");
    c.classifier.bounded_factor = s.number("bounded_factor", c.classifier.bounded_factor);
    c.classifier.terminal_growth_tol = s.number("terminal_growth_tol", c.classifier.terminal_growth_tol);
    s.finish();
  }
  if (root.has("analysis")) {
    Section s = root.child("analysis");
    if (s.has("gn_constant")) c.analysis.gn_constant = s.number("gn_constant");
    s.number("gn_constant", 0.0);  // accepts an explicit null
    c.analysis.budget.multistarts = s.integer("multistarts", c.analysis.budget.multistarts);
    c.analysis.budget.ascent_iterations =
        s.integer("ascent_iterations", c.analysis.budget.ascent_iterations);
    s.finish();
  }
  if (root.has("seed")) {
    const json& seed = root.raw("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
      throw ConfigError("config.seed: expected a non-negative integer");
    }
    c.seed = seed.get<std::uint64_t>();
  }
  c.output = root.text("output", "");
  for (const char* key : {"time", "solver", "classifier", "analysis", "seed", "v0"}) {
    if (doc.contains(key) && doc.at(key).is_null()) root.raw(key);
  }
  root.finish();

  validate(c);
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file \"" + path.string() + "\"");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::string render_config(const SimConfig& c) {
  ordered_json j;
  j["grid"] = {{"Lx", c.grid.lx}, {"Ly", c.grid.ly}, {"nx", c.grid.nx}, {"ny", c.grid.ny}};
  ordered_json model;
  model["chi"] = c.model.chi;
  model["tau"] = c.model.tau;
  model["source"] = render_source(c.model.source);
  j["model"] = model;
  j["initial"] = render_initial(c.initial);
  j["initial_floor"] = c.initial_floor;
  if (c.v0) j["v0"] = render_initial(*c.v0);
  ordered_json t;
  t["t_end"] = c.control.t_end;
  t["dt_init"] = c.control.dt_init;
  t["dt_min"] = c.control.dt_min;
  t["dt_max"] = c.control.dt_max;
  t["cfl_safety"] = c.control.cfl_safety;
  t["record_every"] = c.control.record_every;
  t["record_every_steps"] = c.control.record_every_steps;
  t["overflow_factor"] = c.control.overflow_factor;
  j["time"] = t;
  j["solver"] = {{"rel_tol", c.solver.rel_tol}, {"max_iter", c.solver.max_iter}};
  j["classifier"] = {{"bounded_factor", c.classifier.bounded_factor},
                     {"terminal_growth_tol", c.classifier.terminal_growth_tol}};
  ordered_json a;
  if (c.analysis.gn_constant) {
    a["gn_constant"] = *c.analysis.gn_constant;
  } else {
    a["gn_constant"] = nullptr;
  }
  a["multistarts"] = c.analysis.budget.multistarts;
  a["ascent_iterations"] = c.analysis.budget.ascent_iterations;
  j["analysis"] = a;
  j["seed"] = c.seed;
  j["output"] = c.output;
  return j.dump(2);
}

ScalarField build_initial_u(const SimConfig& config, const Grid& grid) {
  ScalarField u = build_field(config.initial, grid, config.initial_floor);
  for (double x : u.values()) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ConfigError("u0: initial density must be strictly positive and finite in every cell");
    }
  }
  return u;
}

std::optional<ScalarField> build_initial_v(const SimConfig& config, const Grid& grid) {
  if (config.model.tau != 1 || !config.v0) return std::nullopt;
  ScalarField v = build_field(*config.v0, grid, config.initial_floor);
  for (double x : v.values()) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("v0: initial signal must be >= 0");
  }
  return v;
}

SimulationInput make_simulation_input(const SimConfig& config) {
  validate(config);
  const Grid grid = make_grid(config.grid);
  return SimulationInput{build_initial_u(config, grid), build_initial_v(config, grid), config.model,
                         config.control, config.solver};
}

ClassifierConfig classifier_for(const SimConfig& config) {
  ClassifierConfig c = config.classifier;
  c.scale = equilibrium_level(config.model.source).value_or(0.0);
  return c;
}

SimulationResult simulate(const SimConfig& config, const StepObserver& observer) {
  return simulate(make_simulation_input(config), observer);
}

}  // namespace ksg
