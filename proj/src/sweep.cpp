#include "ksg/sweep.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ksg/errors.hpp"
#include "ksg/run.hpp"

namespace ksg {
namespace {

using nlohmann::json;

const std::vector<std::string> kParams = {"chi", "alpha", "K", "total_mass", "nx", "ny", "tau"};

long as_count(const std::string& param, double value) {
  if (value != std::floor(value)) throw ConfigError("sweep: " + param + " needs integer values");
  return static_cast<long>(value);
}

json row_json(const SweepRow& r) {
  return {{"run_id", r.run_id},     {"chi", r.chi},           {"alpha", r.alpha},
          {"K", r.K},               {"mass0", r.mass0},       {"nx", r.nx},
          {"cond_K", r.cond_K},     {"cond_chiM", r.cond_chiM}, {"verdict", r.verdict},
          {"sup_mass", r.sup_mass}, {"sup_F", r.sup_F},       {"sup_umax", r.sup_umax},
          {"status", r.status},     {"wall_s", r.wall_s},     {"failed", r.failed}};
}

SweepRow row_from_json(const json& j) {
  SweepRow r;
  r.run_id = j.at("run_id").get<std::string>();
  r.chi = j.at("chi").get<double>();
  r.alpha = j.at("alpha").get<std::string>();
  r.K = j.at("K").get<std::string>();
  r.mass0 = j.at("mass0").get<double>();
  r.nx = j.at("nx").get<long>();
  r.cond_K = j.at("cond_K").get<std::string>();
  r.cond_chiM = j.at("cond_chiM").get<std::string>();
  r.verdict = j.at("verdict").get<std::string>();
  r.sup_mass = j.at("sup_mass").get<double>();
  r.sup_F = j.at("sup_F").get<double>();
  r.sup_umax = j.at("sup_umax").get<double>();
  r.status = j.at("status").get<std::string>();
  r.wall_s = j.at("wall_s").get<double>();
  r.failed = j.at("failed").get<bool>();
  return r;
}

SweepRow base_row(const SimConfig& config, const std::string& id) {
  SweepRow r;
  r.run_id = id;
  r.chi = config.model.chi;
  if (const auto* g = std::get_if<Gompertz>(&config.model.source)) {
    r.alpha = format_double(g->alpha);
    r.K = format_double(g->K);
  }
  r.nx = config.grid.nx;
  r.cond_K = "NA";
  r.cond_chiM = "NA";
  return r;
}

struct GnKey {
  GridSpec grid;
  long multistarts;
  long iterations;
  std::uint64_t seed;
  bool operator<(const GnKey& o) const {
    return std::tie(grid.lx, grid.ly, grid.nx, grid.ny, multistarts, iterations, seed) <
           std::tie(o.grid.lx, o.grid.ly, o.grid.nx, o.grid.ny, o.multistarts, o.iterations, o.seed);
  }
};

}  // namespace

void apply_parameter(SimConfig& c, const std::string& param, double value) {
  if (param == "chi") {
    c.model.chi = value;
  } else if (param == "alpha" || param == "K") {
    auto* g = std::get_if<Gompertz>(&c.model.source);
    if (g == nullptr) throw ConfigError("sweep: " + param + " applies to the Gompertz source only");
    (param == "alpha" ? g->alpha : g->K) = value;
  } else if (param == "total_mass" || param == "mass0") {
    if (auto* u = std::get_if<UniformInit>(&c.initial)) {
      u->value = value / (c.grid.lx * c.grid.ly);
    } else if (auto* gi = std::get_if<GaussianInit>(&c.initial)) {
      gi->total_mass = value;
    } else if (auto* s = std::get_if<SumOfGaussiansInit>(&c.initial)) {
      double total = 0.0;
      for (const auto& b : s->bumps) total += b.total_mass;
      for (auto& b : s->bumps) b.total_mass *= value / total;
    } else {
      throw ConfigError("sweep: total_mass cannot be applied to file-based initial data");
    }
  } else if (param == "nx") {
    c.grid.nx = as_count(param, value);
  } else if (param == "ny") {
    c.grid.ny = as_count(param, value);
  } else if (param == "tau") {
    c.model.tau = static_cast<int>(as_count(param, value));
    if (c.model.tau == 1 && !c.v0) {
      throw ConfigError("sweep: tau = 1 needs a v0 entry in the base config");
    }
  } else {
    throw ConfigError("sweep: unknown parameter \"" + param + "\"");
  }
}

namespace {
SweepConfig parse_sweep_document(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("sweep config syntax error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("sweep: expected an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "base" && key != "axes" && key != "jobs" && key != "max_runs") {
      throw ConfigError("sweep: unknown key \"" + key + "\"");
    }
  }
  if (!doc.contains("base")) throw ConfigError("sweep.base: missing");
  SweepConfig s;
  s.base = parse_config(doc.at("base").dump(), base_dir);
  if (doc.contains("jobs")) s.jobs = doc.at("jobs").get<long>();
  if (doc.contains("max_runs")) s.max_runs = doc.at("max_runs").get<long>();
  if (s.jobs < 1) throw ConfigError("sweep.jobs must be >= 1");
  if (doc.contains("axes")) {
    const json& axes = doc.at("axes");
    if (!axes.is_array()) throw ConfigError("sweep.axes: expected a list");
    for (const auto& a : axes) {
      if (!a.is_object() || !a.contains("param") || !a.contains("values") || !a.at("values").is_array()) {
        throw ConfigError("sweep.axes: each axis needs \"param\" and a \"values\" list");
      }
      SweepAxis axis{a.at("param").get<std::string>(), {}};
      if (std::find(kParams.begin(), kParams.end(), axis.param) == kParams.end() && axis.param != "mass0") {
        throw ConfigError("sweep: unknown parameter \"" + axis.param + "\"");
      }
      for (const auto& v : a.at("values")) {
        if (!v.is_number()) throw ConfigError("sweep.axes: values must be numbers");
        axis.values.push_back(v.get<double>());
      }
      if (axis.values.empty()) throw ConfigError("sweep.axes: empty value list for " + axis.param);
      s.axes.push_back(std::move(axis));
    }
  }
  double size = 1.0;
  for (const auto& a : s.axes) size *= static_cast<double>(a.values.size());
  if (size > static_cast<double>(s.max_runs)) {
    throw ConfigError("sweep: cross product of " + format_double(size) + " runs exceeds max_runs");
  }
  // Validate every point up front so a bad axis value fails early.
  for (const auto& point : expand_axes(s)) {
    SimConfig c = s.base;
    for (const auto& [p, v] : point) apply_parameter(c, p, v);
    validate(c);
  }
  return s;
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& text, const std::filesystem::path& base_dir) {
  try {
    return parse_sweep_document(text, base_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read sweep config \"" + path.string() + "\"");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_sweep_config(buf.str(), path.parent_path());
}

std::vector<std::vector<std::pair<std::string, double>>> expand_axes(const SweepConfig& sweep) {
  std::vector<std::vector<std::pair<std::string, double>>> points{{}};
  for (const auto& axis : sweep.axes) {
    std::vector<std::vector<std::pair<std::string, double>>> next;
    for (const auto& p : points) {
      for (double v : axis.values) {
        auto q = p;
        q.emplace_back(axis.param, v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

std::string run_id_for(const std::vector<std::pair<std::string, double>>& point) {
  std::string canonical;
  for (const auto& [p, v] : point) canonical += p + "=" + format_double(v) + ";";
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_row(const SweepRow& r) {
  std::ostringstream out;
  out << r.run_id << ',' << format_double(r.chi) << ',' << r.alpha << ',' << r.K << ','
      << format_double(r.mass0) << ',' << r.nx << ',' << r.cond_K << ',' << r.cond_chiM << ','
      << r.verdict << ',' << format_double(r.sup_mass) << ',' << format_double(r.sup_F) << ','
      << format_double(r.sup_umax) << ',' << r.status << ',' << format_double(r.wall_s);
  return out.str();
}

SweepResult run_sweep(const SweepConfig& sweep, const std::filesystem::path& out_root, long jobs) {
  const auto points = expand_axes(sweep);
  std::vector<SimConfig> configs;
  std::vector<std::string> ids;
  for (const auto& point : points) {
    SimConfig c = sweep.base;
    for (const auto& [p, v] : point) apply_parameter(c, p, v);
    ids.push_back(run_id_for(point));
    c.output = (out_root / ids.back()).string();
    configs.push_back(std::move(c));
  }

  std::filesystem::create_directories(out_root);

  // One GN estimate per distinct grid, computed in order before the pool
  // starts so every run sees the same constant regardless of scheduling.
  std::map<GnKey, GnChoice> gn_cache;
  for (const auto& c : configs) {
    if (!std::holds_alternative<Gompertz>(c.model.source) || c.analysis.gn_constant) continue;
    GnKey key{c.grid, c.analysis.budget.multistarts, c.analysis.budget.ascent_iterations, c.seed};
    if (!gn_cache.count(key)) gn_cache.emplace(key, choose_gn_constant(c));
  }

  SweepResult result;
  result.rows.resize(configs.size());
  std::vector<char> resumed(configs.size(), 0);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const SimConfig& c = configs[i];
      const std::filesystem::path dir = c.output;
      const auto done_file = dir / "result.json";
      if (std::filesystem::exists(done_file)) {
        try {
          std::ifstream in(done_file);
          result.rows[i] = row_from_json(json::parse(in));
          resumed[i] = 1;
          continue;
        } catch (const std::exception&) {
          // incomplete record; rerun
        }
      }

      SweepRow row = base_row(c, ids[i]);
      try {
        std::optional<GnChoice> hint;
        if (std::holds_alternative<Gompertz>(c.model.source)) {
          if (c.analysis.gn_constant) {
            hint = GnChoice{*c.analysis.gn_constant, false, std::nullopt};
          } else {
            hint = gn_cache.at(GnKey{c.grid, c.analysis.budget.multistarts,
                                     c.analysis.budget.ascent_iterations, c.seed});
          }
        }
        RunOutcome o = execute_run(c, hint);
        write_run_artifacts(c, o, dir);
        row.mass0 = o.mass0;
        if (o.theorem) {
          row.cond_K = o.theorem->cond_K ? "true" : "false";
          row.cond_chiM = o.theorem->cond_chiM ? "true" : "false";
        }
        row.verdict = verdict_name(o.verdict);
        row.sup_mass = o.sup_mass;
        row.sup_F = o.sup_F;
        row.sup_umax = o.sup_umax;
        row.status = std::string(to_string(o.sim.status.kind));
        row.wall_s = o.wall_s;
        row.failed = exit_code_for(o, false) != kExitSuccess;
      } catch (const std::exception& e) {
        row.verdict = "Failed";
        row.status = "Error";
        row.failed = true;
        write_failure_record(dir, kExitNumericalFailure, "run", e.what());
      }
      try {
        std::ofstream out(done_file, std::ios::trunc);
        out << row_json(row).dump(2) << "\n";
      } catch (const std::exception&) {
      }
      result.rows[i] = std::move(row);
    }
  };

  const long n_threads = std::max(1L, std::min<long>(jobs, static_cast<long>(configs.size())));
  {
    std::vector<std::jthread> pool;
    for (long t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }

  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (result.rows[i].failed) ++result.failures;
    if (resumed[i]) ++result.resumed;
  }

  std::ofstream summary(out_root / "summary.csv", std::ios::binary | std::ios::trunc);
  if (!summary) throw std::runtime_error("cannot write summary.csv under \"" + out_root.string() + "\"");
  summary << kSweepHeader << '\n';
  for (const auto& r : result.rows) summary << format_row(r) << '\n';
  return result;
}

int sweep_command(const std::filesystem::path& config_path, const std::filesystem::path& out_root,
                  long jobs, std::ostream& log) {
  SweepConfig sweep;
  try {
    sweep = load_sweep_config(config_path);
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    write_failure_record(out_root, kExitConfigError, "config", e.what());
    return kExitConfigError;
  }
  SweepResult result;
  try {
    result = run_sweep(sweep, out_root, jobs > 0 ? jobs : sweep.jobs);
  } catch (const std::exception& e) {
    log << "I/O error: " << e.what() << "\n";
    return kExitConfigError;
  }
  log << result.rows.size() << " runs, " << result.failures << " failed, " << result.resumed
      << " resumed\n";
  if (!result.rows.empty() && result.failures == static_cast<long>(result.rows.size())) {
    return kExitNumericalFailure;
  }
  return kExitSuccess;
}

}  // namespace ksg
