#include "ksg/run.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <fstream>
#include <ostream>
#include <system_error>

#include "json.hpp"
#include "ksg/errors.hpp"
#include "ksg/simd/kernels.hpp"

namespace ksg {
namespace {

using nlohmann::ordered_json;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write \"" + path.string() + "\"");
  out << text;
  if (!out) throw std::runtime_error("write failed for \"" + path.string() + "\"");
}

ordered_json grid_json(const Grid& g) {
  return {{"Lx", g.lx()}, {"Ly", g.ly()}, {"nx", g.nx()}, {"ny", g.ny()}};
}

ordered_json verdict_json(const RunOutcome& o) {
  ordered_json j;
  j["verdict"] = verdict_name(o.verdict);
  if (const auto* b = std::get_if<Bounded>(&o.verdict)) {
    j["sup_linf"] = b->sup_linf;
    j["sup_F"] = b->sup_F;
  } else if (const auto* s = std::get_if<BlowupSuspect>(&o.verdict)) {
    j["reason"] = s->reason == BlowupReason::DtCollapse ? "DtCollapse" : "LinfOverflow";
    j["t_event"] = s->t_event;
  } else {
    j["note"] = std::get<Inconclusive>(o.verdict).note;
  }
  j["status"] = std::string(to_string(o.sim.status.kind));
  j["t_final"] = o.sim.final_state.t;
  j["status_detail"] = o.sim.status.detail;
  j["steps"] = o.sim.steps;
  j["mass0"] = o.mass0;
  j["sup_mass"] = o.sup_mass;
  j["sup_F"] = o.sup_F;
  j["sup_umax"] = o.sup_umax;
  j["wall_s"] = o.wall_s;
  return j;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_diagnostics_csv(std::ostream& out, const DiagnosticsSeries& series) {
  out << kDiagnosticsHeader << '\n';
  for (const auto& r : series) {
    out << format_double(r.t) << ',' << format_double(r.dt_used) << ',' << format_double(r.mass)
        << ',' << format_double(r.entropy) << ',' << format_double(r.grad_v_energy) << ','
        << format_double(r.lyapunov_F) << ',' << format_double(r.u_max) << ','
        << format_double(r.u_min) << ',' << format_double(r.u_l2) << ',' << format_double(r.v_max)
        << '\n';
  }
}

GnChoice choose_gn_constant(const SimConfig& config) {
  if (config.analysis.gn_constant) return {*config.analysis.gn_constant, false, std::nullopt};
  GnEstimate est = estimate_gn(make_grid(config.grid), config.analysis.budget, config.seed);
  const double value = est.c_gn_lower;
  return {value, true, std::move(est)};
}

RunOutcome execute_run(const SimConfig& config, const std::optional<GnChoice>& gn_hint) {
  const auto start = std::chrono::steady_clock::now();
  SimulationInput input = make_simulation_input(config);
  const double mass0 = integrate(input.u0);
  const Grid grid = input.u0.grid();

  RunOutcome o{simulate(input), Inconclusive{}, std::nullopt, std::nullopt, mass0};
  o.verdict = classify(o.sim.series, o.sim.status, classifier_for(config));

  if (std::holds_alternative<Gompertz>(config.model.source)) {
    GnChoice gn = gn_hint ? *gn_hint : choose_gn_constant(config);
    o.theorem = check_conditions(config.model, mass0, grid.area(), gn.value, gn.heuristic);
    o.gn_estimate = std::move(gn.estimate);
  }

  o.sup_F = -std::numeric_limits<double>::infinity();
  for (const auto& r : o.sim.series) {
    o.sup_mass = std::max(o.sup_mass, r.mass);
    o.sup_F = std::max(o.sup_F, r.lyapunov_F);
    o.sup_umax = std::max(o.sup_umax, r.u_max);
  }
  o.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return o;
}

int exit_code_for(const RunOutcome& outcome, bool fail_on_blowup) {
  switch (outcome.sim.status.kind) {
    case TerminationKind::PositivityLoss:
    case TerminationKind::SolverFailure:
      return kExitNumericalFailure;
    default:
      break;
  }
  if (fail_on_blowup && std::holds_alternative<BlowupSuspect>(outcome.verdict)) return kExitBlowup;
  return kExitSuccess;
}

std::string theorem_report_json(const TheoremReport& r, const std::optional<GnEstimate>& estimate,
                                double u0_mass) {
  ordered_json j;
  j["applicable"] = true;
  j["u0_mass"] = u0_mass;
  j["M"] = r.M;
  j["alpha"] = r.alpha;
  j["K"] = r.K;
  j["chi"] = r.chi;
  j["c_gn_used"] = r.c_gn_used;
  j["c_gn_source"] = r.c_gn_heuristic ? "heuristic (numerical lower bound)" : "user";
  j["cond_K"] = r.cond_K;
  j["margin_K"] = r.margin_K;
  j["cond_chiM"] = r.cond_chiM;
  j["margin_chiM"] = r.margin_chiM;
  j["overall"] = r.overall;
  j["c1"] = r.c1;
  if (estimate) {
    j["gn_estimate"] = {{"c_gn_lower", estimate->c_gn_lower},
                        {"start_index", estimate->start_index},
                        {"evaluations", estimate->evaluations},
                        {"multistarts", estimate->budget.multistarts},
                        {"ascent_iterations", estimate->budget.ascent_iterations},
                        {"grid", grid_json(estimate->argmax_field.grid())}};
  }
  return j.dump(2);
}

std::string gn_estimate_json(const GnEstimate& e, std::uint64_t seed) {
  ordered_json j;
  j["c_gn_lower"] = e.c_gn_lower;
  j["c_gn_lower_pow4"] = std::pow(e.c_gn_lower, 4);
  j["start_index"] = e.start_index;
  j["evaluations"] = e.evaluations;
  j["multistarts"] = e.budget.multistarts;
  j["ascent_iterations"] = e.budget.ascent_iterations;
  j["seed"] = seed;
  j["grid"] = grid_json(e.argmax_field.grid());
  j["note"] = "lower bound on the domain constant";
  return j.dump(2);
}

void write_run_artifacts(const SimConfig& config, const RunOutcome& o, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory \"" + dir.string() + "\": " + ec.message());

  ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["seed"] = config.seed;
  manifest["simd_backend"] = std::string(simd::to_string(simd::kernels().backend));
  manifest["config"] = ordered_json::parse(render_config(config));
  manifest["warnings"] = config.warnings;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  {
    std::ofstream csv(dir / "diagnostics.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write \"" + (dir / "diagnostics.csv").string() + "\"");
    write_diagnostics_csv(csv, o.sim.series);
  }

  if (o.theorem) {
    write_text(dir / "theorem_report.json", theorem_report_json(*o.theorem, o.gn_estimate, o.mass0) + "\n");
  } else {
    ordered_json na{{"applicable", false},
                    {"reason", "condition check applies to the Gompertz source only"},
                    {"source", std::string(source_name(config.model.source))}};
    write_text(dir / "theorem_report.json", na.dump(2) + "\n");
  }
  write_text(dir / "verdict.json", verdict_json(o).dump(2) + "\n");
}

void write_failure_record(const std::filesystem::path& dir, int exit_code, const std::string& kind,
                          const std::string& message) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return;
  ordered_json j{{"exit_code", exit_code}, {"kind", kind}, {"message", message}};
  std::ofstream out(dir / "failure.json", std::ios::trunc);
  if (out) out << j.dump(2) << "\n";
}

int run_command(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                bool fail_on_blowup, std::ostream& log) {
  SimConfig config;
  try {
    config = load_config(config_path);
    config.output = out_dir.string();
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    write_failure_record(out_dir, kExitConfigError, "config", e.what());
    return kExitConfigError;
  }
  for (const auto& w : config.warnings) log << "warning: " << w << "\n";

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  bool writable = !ec && std::filesystem::is_directory(out_dir);
  if (writable) {
    const auto probe = out_dir / ".write_probe";
    writable = static_cast<bool>(std::ofstream(probe));
    std::error_code ignored;
    std::filesystem::remove(probe, ignored);
  }
  if (!writable) {
    log << "I/O error: output directory \"" << out_dir.string() << "\" is not writable\n";
    return kExitConfigError;
  }

  std::optional<RunOutcome> result;
  try {
    result = execute_run(config);
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    write_failure_record(out_dir, kExitConfigError, "config", e.what());
    return kExitConfigError;
  } catch (const NumericalFailure& e) {
    log << "numerical failure: " << e.what() << "\n";
    write_failure_record(out_dir, kExitNumericalFailure, to_string(e.kind()), e.what());
    return kExitNumericalFailure;
  }

  const RunOutcome& outcome = *result;
  try {
    write_run_artifacts(config, outcome, out_dir);
  } catch (const std::runtime_error& e) {
    log << "I/O error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const int code = exit_code_for(outcome, fail_on_blowup);
  if (code == kExitNumericalFailure) {
    write_failure_record(out_dir, code, std::string(to_string(outcome.sim.status.kind)),
                         outcome.sim.status.detail);
  }
  log << "status " << to_string(outcome.sim.status.kind) << ", verdict "
      << verdict_name(outcome.verdict) << ", t = " << outcome.sim.final_state.t << ", steps "
      << outcome.sim.steps << "\n";
  return code;
}

int check_command(const std::filesystem::path& config_path, std::optional<double> gn_constant,
                  std::ostream& out, std::ostream& log) {
  try {
    SimConfig config = load_config(config_path);
    if (gn_constant) config.analysis.gn_constant = *gn_constant;
    validate(config);
    if (!std::holds_alternative<Gompertz>(config.model.source)) {
      throw ConfigError("check: theorem conditions apply to the Gompertz source only");
    }
    const Grid grid = make_grid(config.grid);
    const double mass0 = integrate(build_initial_u(config, grid));
    GnChoice gn = choose_gn_constant(config);
    const TheoremReport r = check_conditions(config.model, mass0, grid.area(), gn.value, gn.heuristic);
    out << theorem_report_json(r, gn.estimate, mass0) << "\n";
    return kExitSuccess;
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace ksg
