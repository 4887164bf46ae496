#include "cprdyn/cli.hpp"

#include <array>
#include <chrono>
#include <charconv>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cprdyn/equilibria.hpp"
#include "cprdyn/errors.hpp"
#include "cprdyn/io.hpp"

namespace cprdyn {

namespace {

constexpr std::array<const char*, 5> kCommands = {"simulate", "equilibria", "sweep", "ensemble",
                                                   "rules"};

GridSpec parse_grid(const std::string& text, GridSpec grid) {
  const auto sep = text.find_first_of("xX");
  const auto parse_int = [&](std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ValidationError("--grid expects ROWSxCOLS (e.g. 101x101), got '" + text + "'");
    }
    return v;
  };
  if (sep == std::string::npos) {
    throw ValidationError("--grid expects ROWSxCOLS (e.g. 101x101), got '" + text + "'");
  }
  const std::string_view view(text);
  grid.n_r = parse_int(view.substr(0, sep));
  grid.n_x = parse_int(view.substr(sep + 1));
  return grid;
}

std::string_view extension(OutputFormat f) { return f == OutputFormat::Csv ? ".csv" : ".json"; }

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

IntegratorConfig default_integrator(const std::string& command) {
  IntegratorConfig cfg;
  if (command == "sweep") {
    cfg.dt = 0.1;
    cfg.t_max = 10000.0;
  } else {
    cfg.dt = 1e-3;
    cfg.t_max = 200.0;
  }
  return cfg;
}

RunDescription parse_and_validate(const std::vector<std::string>& args) {
  CLI::App app{"Coupled common-pool resource / cooperation dynamics"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read flag values from a key = value file (flags take precedence)");
  app.allow_config_extras(false);

  std::string rule_text = "replicator";
  ModelParams p;
  std::optional<double> r0, x0, dt, t_max, eps_converge, eps_extinct, t_end, sample_dt;
  std::optional<int> sample_every, replicas;
  std::optional<std::uint64_t> seed;
  std::string grid_text;
  std::string output = ".";
  std::string format = "csv";
  unsigned threads = 0;

  app.add_option("--rule", rule_text, "Update rule: " + rule_names_joined("|"));
  app.add_option("--T", p.T, "Resource growth rate");
  app.add_option("--ec-hat", p.ec_hat, "Normalized cooperator extraction N e_C / T");
  app.add_option("--ed-hat", p.ed_hat, "Normalized defector extraction N e_D / T");
  app.add_option("--w", p.w, "Greed parameter in [-1, 0]");
  app.add_option("--c", p.c, "Resource threshold (unit-step, logistic)");
  app.add_option("--k", p.k, "Logistic intensity");
  app.add_option("--N", p.N, "Population size");
  app.add_option("--r0", r0, "Initial resource level");
  app.add_option("--x0", x0, "Initial cooperator fraction");
  app.add_option("--dt", dt, "Integrator step");
  app.add_option("--t-max", t_max, "Integration horizon");
  app.add_option("--eps-converge", eps_converge, "Derivative-norm convergence threshold");
  app.add_option("--eps-extinct", eps_extinct, "Resource extinction threshold");
  app.add_option("--sample-every", sample_every, "Keep every n-th trajectory step");
  app.add_option("--grid", grid_text, "Sweep grid ROWSxCOLS over R0 in [0.01,1], x0 in [0,1]");
  app.add_option("--replicas", replicas, "Ensemble replicas");
  app.add_option("--seed", seed, "Ensemble RNG seed");
  app.add_option("--t-end", t_end, "Ensemble end time");
  app.add_option("--sample-dt", sample_dt, "Ensemble sampling interval");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");
  app.add_option("--output", output, "Output directory");
  app.add_option("--format", format, "Data file format: csv|json");

  for (const char* name : kCommands) app.add_subcommand(name)->fallthrough();
  app.get_subcommand("simulate")->description("Integrate one trajectory");
  app.get_subcommand("equilibria")->description("Stationary points with Jacobian stability");
  app.get_subcommand("sweep")->description("Basin-of-attraction sweep over initial conditions");
  app.get_subcommand("ensemble")->description("Finite-N stochastic ensemble statistics");
  app.get_subcommand("rules")->description("List update rules");

  std::vector<const char*> argv{"cprdyn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw ValidationError(e.what());
  }

  RunDescription run;
  for (const char* name : kCommands) {
    if (app.got_subcommand(name)) run.command = name;
  }

  const auto rule = parse_rule(rule_text);
  if (!rule) {
    throw ValidationError("unknown rule '" + rule_text + "'; valid rules: " +
                          rule_names_joined(", "));
  }
  run.rule = *rule;
  validate(p);
  run.params = p;

  if (r0) run.initial.R = *r0;
  if (x0) run.initial.x = *x0;
  if (!in_unit_box(run.initial)) throw ValidationError("--r0 and --x0 must lie in [0,1]");

  run.integrator = default_integrator(run.command);
  if (dt) run.integrator.dt = *dt;
  if (t_max) run.integrator.t_max = *t_max;
  if (eps_converge) run.integrator.eps_converge = *eps_converge;
  if (eps_extinct) run.integrator.eps_extinct = *eps_extinct;
  if (sample_every) run.integrator.sample_every = *sample_every;
  validate(run.integrator);

  if (!grid_text.empty()) run.grid = parse_grid(grid_text, run.grid);
  validate(run.grid);

  if (replicas) run.ensemble.replicas = *replicas;
  if (seed) run.ensemble.seed = *seed;
  if (t_end) run.ensemble.t_end = *t_end;
  if (sample_dt) run.ensemble.sample_dt = *sample_dt;
  run.ensemble.threads = threads;
  validate(run.ensemble);

  if (format == "csv") {
    run.format = OutputFormat::Csv;
  } else if (format == "json") {
    run.format = OutputFormat::Json;
  } else {
    throw ValidationError("unknown format '" + format + "'; valid formats: csv, json");
  }
  run.output_dir = output;
  run.threads = threads;
  return run;
}

std::vector<std::string> canonical_args(const RunDescription& run) {
  const auto f = [](double v) { return format_double(v); };
  const ModelParams& p = run.params;
  std::vector<std::string> a = {run.command, "--rule",   std::string(rule_name(run.rule)),
                                "--T",       f(p.T),     "--ec-hat",
                                f(p.ec_hat), "--ed-hat", f(p.ed_hat),
                                "--w",       f(p.w),     "--c",
                                f(p.c),      "--k",      f(p.k),
                                "--N",       std::to_string(p.N)};
  const auto add = [&](std::initializer_list<std::string> more) { a.insert(a.end(), more); };
  const IntegratorConfig& ic = run.integrator;
  if (run.command == "simulate" || run.command == "ensemble") {
    add({"--r0", f(run.initial.R), "--x0", f(run.initial.x)});
  }
  if (run.command == "simulate" || run.command == "sweep") {
    add({"--dt", f(ic.dt), "--t-max", f(ic.t_max), "--eps-converge", f(ic.eps_converge),
         "--eps-extinct", f(ic.eps_extinct)});
  }
  if (run.command == "simulate") add({"--sample-every", std::to_string(ic.sample_every)});
  if (run.command == "sweep") {
    add({"--grid", std::to_string(run.grid.n_r) + "x" + std::to_string(run.grid.n_x)});
  }
  if (run.command == "ensemble") {
    const EnsembleConfig& ec = run.ensemble;
    add({"--replicas", std::to_string(ec.replicas), "--seed", std::to_string(ec.seed),
         "--t-end", f(ec.t_end), "--sample-dt", f(ec.sample_dt)});
  }
  add({"--format", run.format == OutputFormat::Csv ? "csv" : "json"});
  return a;
}

std::vector<std::filesystem::path> dispatch(const RunDescription& run, std::ostream& out) {
  if (run.command == "rules") {
    for (UpdateRule rule : kAllRules) {
      out << std::left << std::setw(12) << rule_name(rule) << std::setw(18)
          << (is_pairwise(rule) ? "pairwise" : "resource-driven") << rule_description(rule) << "\n";
    }
    return {};
  }

  const auto started = std::chrono::steady_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(run.output_dir, ec);
  if (ec || !std::filesystem::is_directory(run.output_dir)) {
    throw IoError("cannot create output directory " + run.output_dir.string());
  }

  RunManifest manifest;
  manifest.tool_version = std::string(tool_version());
  manifest.command = run.command;
  manifest.rule = std::string(rule_name(run.rule));
  manifest.params = run.params;
  manifest.args = canonical_args(run);

  std::string data;
  std::filesystem::path data_path;
  const bool csv = run.format == OutputFormat::Csv;

  if (run.command == "simulate") {
    const Trajectory traj = integrate(run.rule, run.params, run.initial, run.integrator);
    data = csv ? trajectory_csv(traj) : dump(trajectory_json(traj));
    data_path = run.output_dir / ("trajectory" + std::string(extension(run.format)));
    manifest.settings = {{"integrator", integrator_json(run.integrator)},
                         {"initial", {{"R0", run.initial.R}, {"x0", run.initial.x}}}};
    manifest.summary = {
        {"terminal", traj.terminal == Terminal::Converged ? "converged" : "horizon_reached"},
        {"samples", traj.times.size()},
        {"final", {{"t", traj.times.back()}, {"R", traj.states.back().R}, {"x", traj.states.back().x}}}};
  } else if (run.command == "equilibria") {
    const StationarySet set = stationary_points(run.rule, run.params);
    const auto reports = analyze_all(run.rule, run.params, default_line_samples());
    data = csv ? equilibria_csv(reports) : dump(equilibria_json(run.rule, run.params, reports, set.diagnostic));
    data_path = run.output_dir / ("equilibria" + std::string(extension(run.format)));
    manifest.settings = {{"line_samples", default_line_samples()}};
    if (set.diagnostic) manifest.summary["diagnostic"] = *set.diagnostic;
    manifest.summary["points"] = reports.size();
  } else if (run.command == "sweep") {
    const BasinMap map = run_basin_sweep(run.rule, run.params, run.grid, run.integrator, run.threads);
    data = csv ? sweep_csv(map) : dump(sweep_json(map));
    data_path = run.output_dir / ("sweep" + std::string(extension(run.format)));
    manifest.settings = {{"integrator", integrator_json(run.integrator)}, {"grid", grid_json(run.grid)}};
    manifest.summary = {{"depleted", map.count(Outcome::Depleted)},
                        {"sustainable", map.count(Outcome::Sustainable)},
                        {"unresolved", map.count(Outcome::Unresolved)}};
  } else if (run.command == "ensemble") {
    const EnsembleStats stats = run_ensemble(run.rule, run.params, run.initial, run.ensemble);
    data = csv ? ensemble_csv(stats) : dump(ensemble_json(stats));
    data_path = run.output_dir / ("ensemble" + std::string(extension(run.format)));
    manifest.seed = run.ensemble.seed;
    manifest.settings = {{"ensemble",
                          {{"replicas", run.ensemble.replicas},
                           {"t_end", run.ensemble.t_end},
                           {"sample_dt", run.ensemble.sample_dt},
                           {"seed", run.ensemble.seed}}},
                         {"initial", {{"R0", run.initial.R}, {"x0", run.initial.x}}}};
  } else {
    throw ValidationError("unknown command '" + run.command + "'");
  }

  write_file_atomic(data_path, data);
  const std::filesystem::path manifest_path = run.output_dir / (run.command + ".manifest.json");
  manifest.outputs = {data_path.string()};
  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_file_atomic(manifest_path, dump(to_json(manifest)));

  out << "wrote " << data_path.string() << " and " << manifest_path.string() << "\n";
  return {data_path, manifest_path};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const RunDescription run = parse_and_validate(args);
    dispatch(run, out);
    return static_cast<int>(ExitCode::Ok);
  } catch (const HelpRequested& help) {
    out << help.what();
    return static_cast<int>(ExitCode::Ok);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Validation);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Numerical);
  } catch (const DomainError& e) {
    err << "numerical error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Numerical);
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Io);
  }
}

}  // namespace cprdyn
